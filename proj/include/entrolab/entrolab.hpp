#pragma once

#include "entrolab/app.hpp"
#include "entrolab/cat_suite.hpp"
#include "entrolab/complexity.hpp"
#include "entrolab/corpus.hpp"
#include "entrolab/cover_lattice.hpp"
#include "entrolab/covers.hpp"
#include "entrolab/error.hpp"
#include "entrolab/independent_set.hpp"
#include "entrolab/invariants.hpp"
#include "entrolab/metric.hpp"
#include "entrolab/order.hpp"
#include "entrolab/parallel.hpp"
#include "entrolab/point_set.hpp"
#include "entrolab/serialize.hpp"
#include "entrolab/set_cover.hpp"
#include "entrolab/systems.hpp"
