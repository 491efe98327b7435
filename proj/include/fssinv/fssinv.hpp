#pragma once

#include "fssinv/dataset.hpp"
#include "fssinv/em_surrogate.hpp"
#include "fssinv/error.hpp"
#include "fssinv/eval.hpp"
#include "fssinv/geometry.hpp"
#include "fssinv/metrics.hpp"
#include "fssinv/models/model.hpp"
#include "fssinv/postprocess.hpp"
