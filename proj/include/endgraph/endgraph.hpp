#pragma once

#include "endgraph/error.hpp"
#include "endgraph/presentation.hpp"
#include "endgraph/endspace.hpp"
#include "endgraph/transform.hpp"
#include "endgraph/ordertree.hpp"
#include "endgraph/rayset.hpp"
#include "endgraph/game.hpp"
#include "endgraph/subbase.hpp"
#include "endgraph/reconstruct.hpp"
#include "endgraph/corpus.hpp"
