#pragma once

#include <stdexcept>
#include <string>

namespace rumorsim {

/// Invalid user-supplied parameters or configuration documents.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A quantity is undefined for the given input (empty graph, isolated node, constant series).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Two series that must be step-aligned are not.
class AlignmentError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Mismatched component contracts, e.g. embedding dimensions.
class InterfaceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A driver (scripted or remote) failed to produce a usable answer.
class DriverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Checkpoint cannot be read: bad magic, version, checksum or config hash.
class CheckpointError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Unrecoverable failure during a run; partial outputs have been flushed.
class RunAbort : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace rumorsim
