#ifndef SUBLIN_SUBLIN_HPP
#define SUBLIN_SUBLIN_HPP

#include "sublin/bounds.hpp"
#include "sublin/dependence.hpp"
#include "sublin/errors.hpp"
#include "sublin/experiments.hpp"
#include "sublin/family.hpp"
#include "sublin/generators.hpp"
#include "sublin/lattice.hpp"
#include "sublin/measure_space.hpp"
#include "sublin/piecewise_linear.hpp"
#include "sublin/rng.hpp"
#include "sublin/transforms.hpp"

#endif
