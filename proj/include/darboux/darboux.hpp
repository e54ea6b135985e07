#pragma once

#include "darboux/backlund.hpp"
#include "darboux/elliptic.hpp"
#include "darboux/errors.hpp"
#include "darboux/figures.hpp"
#include "darboux/io.hpp"
#include "darboux/residuals.hpp"
#include "darboux/sampled.hpp"
#include "darboux/spectral.hpp"
#include "darboux/superpotential.hpp"
