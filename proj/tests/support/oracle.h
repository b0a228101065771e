#pragma once

#include <optional>
#include <string>

#include "forge/doc_model.h"
#include "forge/program.h"
#include "forge/templates.h"

namespace forge::testing {

// Answers recomputed straight from template semantics by brute force over
// the document. Shares no code with the interpreter or the graph builders.
struct OracleAnswer {
  enum class Status { kValue, kOverflow, kAnchorNotFound };
  Status status = Status::kValue;
  AnswerValue value;
};

OracleAnswer oracle_execute(const QuestionTemplate& tpl, const ParamBinding& binding, const Document& doc,
                            const Page* page);

// Where b sits relative to a, as a relation name.
std::optional<std::string> oracle_relation(const BoundingBox& a, const BoundingBox& b);

// Last Title before the element in reading order; a float with a caption
// takes the caption's position.
const DocElement* oracle_owning_title(const Document& doc, const DocElement& e);

}  // namespace forge::testing
