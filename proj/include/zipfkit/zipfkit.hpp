#pragma once

#include "zipfkit/corpus.hpp"
#include "zipfkit/corpus_io.hpp"
#include "zipfkit/error.hpp"
#include "zipfkit/facgrammar.hpp"
#include "zipfkit/generators.hpp"
#include "zipfkit/hypothesis.hpp"
#include "zipfkit/ingest.hpp"
#include "zipfkit/rankstats.hpp"
#include "zipfkit/rng.hpp"
#include "zipfkit/special.hpp"
#include "zipfkit/tokenize.hpp"

namespace zipfkit {
inline constexpr const char* kVersion = "0.1.0";
}
