#pragma once

#include "qindep/arith.hpp"
#include "qindep/cyclotomic.hpp"
#include "qindep/datasets.hpp"
#include "qindep/group.hpp"
#include "qindep/linalg.hpp"
#include "qindep/permutations.hpp"
#include "qindep/psi.hpp"
#include "qindep/qi_table.hpp"
#include "qindep/rational.hpp"
#include "qindep/relations.hpp"
#include "qindep/search.hpp"
#include "qindep/version.hpp"
