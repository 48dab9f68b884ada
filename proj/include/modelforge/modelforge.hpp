#pragma once

#include "modelforge/errors.hpp"
#include "modelforge/logic/vocabulary.hpp"
#include "modelforge/logic/formula.hpp"
#include "modelforge/logic/structure.hpp"
#include "modelforge/logic/syntax.hpp"
#include "modelforge/logic/evaluate.hpp"
#include "modelforge/logic/delta.hpp"
#include "modelforge/logic/flatten.hpp"
#include "modelforge/logic/enumerate.hpp"
#include "modelforge/filter/index_set.hpp"
#include "modelforge/filter/filter.hpp"
#include "modelforge/filter/reduced_product.hpp"
#include "modelforge/coherent/family.hpp"
#include "modelforge/coherent/square.hpp"
#include "modelforge/coherent/derive.hpp"
#include "modelforge/coherent/s_family.hpp"
#include "modelforge/embedding/theta.hpp"
#include "modelforge/embedding/embedding.hpp"
#include "modelforge/game/position.hpp"
#include "modelforge/game/solver.hpp"
#include "modelforge/game/product.hpp"
#include "modelforge/game/play.hpp"
#include "modelforge/gen/instances.hpp"
#include "modelforge/io/serialize.hpp"
