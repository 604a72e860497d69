#pragma once

#include <stdexcept>
#include <string>

namespace boostlab {

enum class ErrorCode {
  InvalidArgument,
  Io,
  MalformedCsv,
  UnknownColumn,
  LabelNotBinary,
  EmptyDataset,
  DegenerateSchema,
  SingleClassDataset,
  EmptyData,
  SchemaMismatch,
  LengthMismatch,
  SingleClassTruth,
  NoPositives,
  InvalidModel,
};

const char* error_code_name(ErrorCode code) noexcept;

// All library failures surface as this exception; the C API maps the code
// onto a status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace boostlab
