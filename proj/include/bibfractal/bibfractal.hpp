#pragma once

#include "bibfractal/bayes.hpp"
#include "bibfractal/bib_loop.hpp"
#include "bibfractal/error.hpp"
#include "bibfractal/fractal_metrics.hpp"
#include "bibfractal/inverse_bayes.hpp"
#include "bibfractal/newton.hpp"
#include "bibfractal/perception.hpp"
#include "bibfractal/rough_partition.hpp"
#include "bibfractal/statistics.hpp"
#include "bibfractal/walker.hpp"
