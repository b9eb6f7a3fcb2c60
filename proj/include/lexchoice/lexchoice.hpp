#pragma once

#include "lexchoice/choice.hpp"
#include "lexchoice/cooc_stats.hpp"
#include "lexchoice/corpus.hpp"
#include "lexchoice/error.hpp"
#include "lexchoice/eval.hpp"
#include "lexchoice/network.hpp"
