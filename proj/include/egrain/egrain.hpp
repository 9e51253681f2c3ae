#pragma once

#include "egrain/binning.hpp"
#include "egrain/bounds.hpp"
#include "egrain/density.hpp"
#include "egrain/domain.hpp"
#include "egrain/entropy.hpp"
#include "egrain/errors.hpp"
#include "egrain/fourier.hpp"
#include "egrain/harness.hpp"
#include "egrain/quadrature.hpp"
#include "egrain/specfun.hpp"
#include "egrain/states.hpp"
