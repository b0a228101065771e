#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/doc_model.h"

namespace forge::testing {

struct SynthOptions {
  int min_pages = 1;
  int max_pages = 4;
  int min_elements = 3;
  int max_elements = 25;
};

// Small deterministic helpers so test data does not depend on the standard
// library's distributions.
int uniform_int(std::mt19937_64& rng, int lo, int hi);  // inclusive
double uniform_real(std::mt19937_64& rng, double lo, double hi);

BoundingBox random_box(std::mt19937_64& rng);

// Annotation JSON for a random document: numbered section titles, float
// mentions, citations and columns.
nlohmann::json random_document_json(std::mt19937_64& rng, const std::string& doc_id, const SynthOptions& opts = {});

// Parsed and preprocessed.
Document random_document(std::mt19937_64& rng, const std::string& doc_id, const SynthOptions& opts = {});

std::vector<Document> random_corpus(std::uint64_t seed, int docs, const SynthOptions& opts = {});

// One page: Title "Results", a Text block, a Table with a Text just below it
// and a Figure at the bottom right.
nlohmann::json fixture_p1_json();
Document fixture_p1();

}  // namespace forge::testing
