#pragma once

#include "eqlog/program.hpp"

#include <string_view>

namespace eqlog {

// Grammar (UTF-8, `#` starts a line comment):
//
//   program  := { vardecl | rule }
//   vardecl  := "vars" ident+ ";"
//   rule     := term "->" term ";"
//   term     := ident "(" term { "," term } ")" | ident | int | "true" | "false"
//             | term binop term | "(" term ")"
//   binop    := "+" | "-" | "*" | ">" | "<" | "=="
//
// A `-` immediately followed by digits where a term is expected is a
// negative literal. Every failure raises ProgramError with line and column.

Program parse_program(std::string_view text);

/// Parse a term against an existing program's symbols. With `require_ground`
/// (the default for goals) variables are rejected.
Term parse_term(std::string_view text, const Program& program, bool require_ground = true);

}  // namespace eqlog
