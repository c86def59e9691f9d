#pragma once

// Umbrella header.

#include "pwca/dataio.hpp"
#include "pwca/eigsolve.hpp"
#include "pwca/errors.hpp"
#include "pwca/kcca.hpp"
#include "pwca/kernels.hpp"
#include "pwca/model_io.hpp"
#include "pwca/pacbayes.hpp"
#include "pwca/pwca.hpp"
#include "pwca/report_table.hpp"
#include "pwca/retrieval.hpp"
#include "pwca/rng.hpp"
