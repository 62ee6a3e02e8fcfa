#pragma once

#include <stdexcept>
#include <string>

namespace magseq {

// Invalid physics/training parameters or mismatched inputs.
class param_error : public std::invalid_argument {
public:
    explicit param_error(const std::string& what) : std::invalid_argument(what) {}
};

// File could not be opened/read/written.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Bad magic, unsupported version, or otherwise malformed container.
class format_error : public std::runtime_error {
public:
    explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

// Header promises more payload than the stream holds.
class truncation_error : public std::runtime_error {
public:
    explicit truncation_error(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values where finite arithmetic is required (e.g. diverged training).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace magseq
