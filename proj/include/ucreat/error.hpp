#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ucreat {

/// Root of every error thrown by the library.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A required input file or directory could not be read.
class ingestion_error : public error {
  public:
    explicit ingestion_error(std::string path)
        : error("cannot read '" + path + "'"), m_path(std::move(path))
    {}

    const std::string& path() const noexcept { return m_path; }

  private:
    std::string m_path;
};

/// Inputs are readable but violate a structural invariant (corpus manifest,
/// label alignment).
class validation_error : public error {
  public:
    using error::error;
};

/// Malformed CoNLL-U input.
class parse_error : public error {
  public:
    parse_error(std::string const& doc_id, std::size_t line, std::string const& what)
        : error(doc_id + ":" + std::to_string(line) + ": " + what), m_line(line)
    {}

    std::size_t line() const noexcept { return m_line; }

  private:
    std::size_t m_line;
};

/// Invalid run configuration, detected before any work starts.
class config_error : public error {
  public:
    using error::error;
};

/// A document id was not found in an index.
class lookup_error : public error {
  public:
    using error::error;
};

}  // namespace ucreat
