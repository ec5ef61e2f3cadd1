#pragma once

// Umbrella header.

#include "semcse/analysis.hpp"
#include "semcse/benchmark.hpp"
#include "semcse/checkpoint.hpp"
#include "semcse/corpus.hpp"
#include "semcse/encoder.hpp"
#include "semcse/error.hpp"
#include "semcse/exchange.hpp"
#include "semcse/losses.hpp"
#include "semcse/manifest.hpp"
#include "semcse/ranking.hpp"
#include "semcse/rng.hpp"
#include "semcse/synthetic.hpp"
#include "semcse/text.hpp"
#include "semcse/trainer.hpp"
#include "semcse/training.hpp"
#include "semcse/vocab.hpp"
