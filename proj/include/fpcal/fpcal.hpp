#pragma once

#include "fpcal/calibrator.hpp"
#include "fpcal/dataio.hpp"
#include "fpcal/effort_model.hpp"
#include "fpcal/error.hpp"
#include "fpcal/evaluation.hpp"
#include "fpcal/fp_core.hpp"
#include "fpcal/fuzzy.hpp"
#include "fpcal/serialization.hpp"
