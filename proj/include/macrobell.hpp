#pragma once

#include "macrobell/error.hpp"
#include "macrobell/box.hpp"
#include "macrobell/simplex.hpp"
#include "macrobell/polytope.hpp"
#include "macrobell/voting.hpp"
#include "macrobell/macro.hpp"
#include "macrobell/closed_form.hpp"
#include "macrobell/exact.hpp"
#include "macrobell/philox.hpp"
#include "macrobell/montecarlo.hpp"
#include "macrobell/ic.hpp"
#include "macrobell/classify.hpp"
#include "macrobell/io.hpp"
