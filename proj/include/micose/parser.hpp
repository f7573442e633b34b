#pragma once

#include <stdexcept>
#include <string_view>

#include "micose/ast.hpp"

namespace micose {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// More than one POU in a source text; callers split first.
class MultiPouError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Parses exactly one POU. Local syntax errors are recovered at statement
/// boundaries and recorded in Pou::diagnostics. Throws ParseError when no
/// POU header is found, MultiPouError when the text holds several POUs.
Pou parse_pou(std::string_view text);

/// Non-empty, non-comment line count.
int count_sloc(std::string_view text);

/// Splits a source file on POU header keywords. Each returned chunk holds
/// one POU declaration block. Text before the first header is dropped.
std::vector<std::string> split_pous(std::string_view text);

} // namespace micose
