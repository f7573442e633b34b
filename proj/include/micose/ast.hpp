#pragma once

#include <string>
#include <vector>

#include "micose/token.hpp"

namespace micose {

enum class PouKind : std::uint8_t { PRG, FC, FB };

enum class DeclSection : std::uint8_t {
    VarInput,
    VarOutput,
    VarInOut,
    Var,
    VarGlobalRef, // VAR_GLOBAL / VAR_EXTERNAL references
    Constant,     // VAR CONSTANT
};

enum class StatementKind : std::uint8_t {
    Assign,
    If,
    ElsifArm,
    ElseArm,
    Case,
    CaseArm,
    For,
    While,
    Repeat,
    Call,
    Exit,
    Return,
    Empty,
};

bool is_compound(StatementKind k);
std::string_view to_string(PouKind k);
std::string_view to_string(DeclSection s);
std::string_view to_string(StatementKind k);

struct Declaration {
    std::string name; // normalized (uppercase)
    DeclSection section;
    std::string datatype;    // normalized type text
    std::string initializer; // normalized expression text, empty if none
    int line = 0;
};

struct Statement {
    StatementKind kind;
    // Own tokens: the condition/header for compound statements, the full
    // expression for Assign/Call. Child statements are not included.
    std::vector<Token> tokens;
    std::vector<Statement> children;
    int depth = 0;
    int line = 0;

    bool deep_equal(const Statement& other) const;
};

struct Diagnostic {
    int line;
    std::string message;
};

struct Pou {
    std::string name; // normalized (uppercase)
    PouKind kind = PouKind::FB;
    std::vector<Declaration> interface;
    std::vector<Statement> body;
    std::vector<Token> body_tokens; // flat token stream of the body region
    int sloc = 0;
    std::vector<Diagnostic> diagnostics;
};

struct SourceUnit {
    std::string path;
    std::string text;
    std::string encoding = "utf-8";
};

} // namespace micose
