#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdprofile {

// Root of every error raised by the library. Callers that only need a message
// catch this; the service layer maps the concrete types onto API error codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- ingestion -------------------------------------------------------------

class ParseError : public Error {
public:
    using Error::Error;
};

// Malformed JSON. line/column are 1-based.
class SyntaxError : public ParseError {
public:
    SyntaxError(const std::string& what, std::size_t line, std::size_t column)
        : ParseError(what), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Well-formed JSON that does not match the export schema (missing or unknown
// fields, wrong types, bad enum values).
class SchemaError : public ParseError {
public:
    using ParseError::ParseError;
};

class UnknownAuthor : public ParseError {
public:
    explicit UnknownAuthor(std::string author)
        : ParseError("post references unknown member \"" + author + "\""), author_(std::move(author)) {}
    const std::string& author() const { return author_; }

private:
    std::string author_;
};

class InvalidTimestamp : public ParseError {
public:
    using ParseError::ParseError;
};

class DuplicateUsername : public ParseError {
public:
    explicit DuplicateUsername(const std::string& username)
        : ParseError("duplicate username \"" + username + "\"") {}
};

class DuplicatePostId : public ParseError {
public:
    explicit DuplicatePostId(const std::string& id) : ParseError("duplicate post id \"" + id + "\"") {}
};

// ---- rules -----------------------------------------------------------------

class ConfigError : public Error {
public:
    using Error::Error;
};

class BadPattern : public ConfigError {
public:
    BadPattern(std::string rule_id, const std::string& detail)
        : ConfigError("rule \"" + rule_id + "\": pattern does not compile: " + detail),
          rule_id_(std::move(rule_id)) {}
    const std::string& rule_id() const { return rule_id_; }

private:
    std::string rule_id_;
};

class DuplicateRuleId : public ConfigError {
public:
    explicit DuplicateRuleId(const std::string& id) : ConfigError("duplicate rule id \"" + id + "\"") {}
};

// ---- inference / verification ----------------------------------------------

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class UsernameMismatch : public Error {
public:
    using Error::Error;
};

class BadThresholds : public Error {
public:
    using Error::Error;
};

// ---- workflow --------------------------------------------------------------

class IllegalTransition : public Error {
public:
    IllegalTransition(std::string state, std::string action)
        : Error("action '" + action + "' is not allowed in state '" + state + "'"),
          state_(std::move(state)), action_(std::move(action)) {}
    const std::string& state() const { return state_; }
    const std::string& action() const { return action_; }

private:
    std::string state_;
    std::string action_;
};

class OutOfOrderAction : public Error {
public:
    using Error::Error;
};

// ---- store / service -------------------------------------------------------

class StoreError : public Error {
public:
    using Error::Error;
};

class StoreLocked : public StoreError {
public:
    using StoreError::StoreError;
};

class ConflictError : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

}  // namespace sdprofile
