#pragma once

#include "errors.hpp"
#include "projective.hpp"
#include "rng.hpp"
#include "parallel.hpp"
#include "cocycle.hpp"
#include "measure.hpp"
#include "exponents.hpp"
#include "stationary.hpp"
#include "oseledets.hpp"
#include "holder.hpp"
#include "experiments.hpp"
#include "config.hpp"
