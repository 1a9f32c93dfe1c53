#pragma once

#include <string>
#include <string_view>

#include "greenprint/arch.hpp"

namespace greenprint {

// Line-oriented `.nnm` model description.
//
//   # comment
//   model "name"
//   input R C CH
//   conv2d filters=N kernel=RxC [stride=RxC] [pad=RxC] [activation=A [alpha=X]] [bias=B] [on=LABEL]
//   maxpool|avgpool kernel=RxC [stride=RxC]
//   batchnorm [on=LABEL]
//   flatten | globalavgpool
//   dense units=N [activation=A [alpha=X]] [bias=B]
//   activation kind=A [alpha=X]
//   label ID | addfrom ID
//   resblock filters=N [downsample=B]
//
// The returned graph has passed validate_graph; macros are kept as written.
// Throws ParseError with the 1-based line and column of the offending token.
ModelGraph parse_model(std::string_view text);

// Canonical text: one layer per line, fixed field order, defaults omitted
// except for geometry, LF line endings, no trailing newline.
std::string serialize_model(const ModelGraph& graph);

}  // namespace greenprint
