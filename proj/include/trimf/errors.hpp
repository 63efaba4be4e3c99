// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace trimf {

// Error taxonomy mirrored by the C API status codes.
enum class ErrorKind {
    Contract,   // caller violated an internal precondition
    Dimension,  // tensor shape mismatch
    Config,     // bad configuration file or key
    Corpus,     // malformed or invalid corpus
    Compat,     // checkpoint/corpus vocabulary mismatch
    Io,         // file system failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_contract(const std::string& msg) {
    throw Error(ErrorKind::Contract, msg);
}
[[noreturn]] inline void throw_dim(const std::string& msg) {
    throw Error(ErrorKind::Dimension, msg);
}
[[noreturn]] inline void throw_config(const std::string& msg) {
    throw Error(ErrorKind::Config, msg);
}
[[noreturn]] inline void throw_corpus(const std::string& msg) {
    throw Error(ErrorKind::Corpus, msg);
}
[[noreturn]] inline void throw_compat(const std::string& msg) {
    throw Error(ErrorKind::Compat, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
    throw Error(ErrorKind::Io, msg);
}

}  // namespace trimf
