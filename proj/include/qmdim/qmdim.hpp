#pragma once

#include "qmdim/errors.hpp"
#include "qmdim/linalg.hpp"
#include "qmdim/quantum.hpp"
#include "qmdim/graph.hpp"
#include "qmdim/instance.hpp"
#include "qmdim/reductions.hpp"
#include "qmdim/solver.hpp"
#include "qmdim/io.hpp"
