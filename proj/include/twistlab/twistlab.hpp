#pragma once

#include "twistlab/error.hpp"
#include "twistlab/cover.hpp"
#include "twistlab/circle.hpp"
#include "twistlab/parallel.hpp"
#include "twistlab/annulus.hpp"
#include "twistlab/billiard.hpp"
#include "twistlab/families.hpp"
#include "twistlab/curves.hpp"
#include "twistlab/config.hpp"
#include "twistlab/io.hpp"
#include "twistlab/cli.hpp"
