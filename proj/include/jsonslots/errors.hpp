#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace jsonslots {

// Base for all library errors. `code()` is a stable machine-readable
// identifier used in CLI error reports.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class InvalidName : public Error {
public:
    explicit InvalidName(const std::string& message) : Error("invalid_name", message) {}
};

// Wire-format parse failure. `offset` is the byte offset into the input
// where the problem was detected.
class ExtractionParseError : public Error {
public:
    enum class Kind { malformed_json, schema_violation };

    ExtractionParseError(Kind kind, std::size_t offset, const std::string& reason)
        : Error(kind == Kind::malformed_json ? "malformed_json" : "schema_violation",
                reason + " (byte " + std::to_string(offset) + ")"),
          kind_(kind),
          offset_(offset),
          reason_(reason) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    Kind kind_;
    std::size_t offset_;
    std::string reason_;
};

class ExemplarIntentMismatch : public Error {
public:
    explicit ExemplarIntentMismatch(const std::string& message)
        : Error("exemplar_intent_mismatch", message) {}
};

class NoEligibleExemplar : public Error {
public:
    explicit NoEligibleExemplar(const std::string& message)
        : Error("no_eligible_exemplar", message) {}
};

class InvalidBio : public Error {
public:
    explicit InvalidBio(const std::string& message) : Error("invalid_bio", message) {}
};

class PoolTooSmall : public Error {
public:
    explicit PoolTooSmall(const std::string& message) : Error("pool_too_small", message) {}
};

class UnknownType : public Error {
public:
    explicit UnknownType(const std::string& message) : Error("unknown_type", message) {}
};

class NotEnoughExemplars : public Error {
public:
    explicit NotEnoughExemplars(const std::string& message)
        : Error("not_enough_exemplars", message) {}
};

class ClientError : public Error {
public:
    explicit ClientError(const std::string& message) : Error("client_error", message) {}
};

class FixtureMiss : public Error {
public:
    explicit FixtureMiss(const std::string& message) : Error("fixture_miss", message) {}
};

class SizeLimit : public Error {
public:
    explicit SizeLimit(const std::string& message) : Error("size_limit", message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io_error", message) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error("data_error", message) {}
};

}  // namespace jsonslots
