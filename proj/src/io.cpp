#include "boostlab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "boostlab/error.hpp"

namespace boostlab {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::LabelNotBinary: return "LabelNotBinary";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DegenerateSchema: return "DegenerateSchema";
    case ErrorCode::SingleClassDataset: return "SingleClassDataset";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SingleClassTruth: return "SingleClassTruth";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::InvalidModel: return "InvalidModel";
  }
  return "Unknown";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write file '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename into '" + path.string() + "'");
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace boostlab
