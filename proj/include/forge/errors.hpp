#pragma once

#include <stdexcept>
#include <string>

namespace forge {

// Base for all library errors. Everything thrown on a user-facing path
// derives from this, so callers can catch one type at the boundary.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ParseErrorKind {
  MissingSection,
  UnknownSpriteClass,
  UnresolvedIdentifier,
  NonRectangularLevel,
  NoAvatar,
  DuplicateAvatar,
  DuplicateName,
  UnknownCharacter,
  MissingTermination,
  InvalidModifier,
  BadSyntax,
};

const char* to_string(ParseErrorKind kind);

// Raised by the game-description parser and validator. `line` is 1-based
// within the offending file; 0 when the problem is not tied to a line.
class ParseError : public Error {
public:
  ParseError(ParseErrorKind kind, int line, const std::string& msg)
      : Error(std::string(to_string(kind)) + " (line " + std::to_string(line) + "): " + msg),
        kind(kind),
        line(line) {}

  ParseErrorKind kind;
  int line;
};

class EngineError : public Error {
public:
  using Error::Error;
};

class LevelTooLarge : public Error {
public:
  using Error::Error;
};

class SchemaMismatch : public Error {
public:
  using Error::Error;
};

class SingleClassDataset : public Error {
public:
  using Error::Error;
};

class CorruptModel : public Error {
public:
  using Error::Error;
};

class WrongCount : public Error {
public:
  using Error::Error;
};

class UnplayableGame : public Error {
public:
  using Error::Error;
};

class ConfigInfeasible : public Error {
public:
  using Error::Error;
};

class BudgetExhausted : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace forge
