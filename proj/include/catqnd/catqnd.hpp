#pragma once

#include "catqnd/cat_analysis.hpp"
#include "catqnd/errors.hpp"
#include "catqnd/feasibility.hpp"
#include "catqnd/grid.hpp"
#include "catqnd/hermite.hpp"
#include "catqnd/io.hpp"
#include "catqnd/number_state.hpp"
#include "catqnd/qnd.hpp"
#include "catqnd/quadrature.hpp"
#include "catqnd/random.hpp"
