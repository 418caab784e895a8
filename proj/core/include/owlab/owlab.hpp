#pragma once

#include "owlab/almostdiag.hpp"
#include "owlab/csv.hpp"
#include "owlab/dyadic.hpp"
#include "owlab/errors.hpp"
#include "owlab/estimators.hpp"
#include "owlab/fit.hpp"
#include "owlab/lpfilters.hpp"
#include "owlab/operators.hpp"
#include "owlab/seqspace.hpp"
#include "owlab/sphere_search.hpp"
#include "owlab/traceext.hpp"
#include "owlab/weights.hpp"
