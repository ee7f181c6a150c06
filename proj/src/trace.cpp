#include "gloran/trace.hpp"

#include <fstream>
#include <sstream>

namespace gloran {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::string hex_encode(const std::string& bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(kHexDigits[c >> 4]);
    out.push_back(kHexDigits[c & 15]);
  }
  return out;
}

std::string hex_decode(const std::string& hex) {
  if (hex.size() % 2 != 0) throw StoreError("odd-length hex value");
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_val(hex[i]), lo = hex_val(hex[i + 1]);
    if (hi < 0 || lo < 0) throw StoreError("bad hex value: " + hex);
    out.push_back(static_cast<char>((hi << 4) | lo));
  }
  return out;
}

std::string format_operation(const Operation& op) {
  std::ostringstream out;
  switch (op.kind) {
    case OpKind::kUpdate:
      // "-" stands for an empty value so the line always has three fields
      out << "U " << op.key << " "
          << (op.value.empty() ? "-" : hex_encode(op.value));
      break;
    case OpKind::kGet: out << "G " << op.key; break;
    case OpKind::kDelete: out << "D " << op.key; break;
    case OpKind::kRangeDelete: out << "R " << op.key << " " << op.key2; break;
    case OpKind::kScan: out << "S " << op.key << " " << op.key2; break;
  }
  return out.str();
}

Operation parse_operation(const std::string& line, std::size_t line_no) {
  std::istringstream in(line);
  std::string tag;
  if (!(in >> tag))
    throw StoreError("trace line " + std::to_string(line_no) + ": empty");
  Operation op;
  auto need_key = [&](Key& k) {
    if (!(in >> k))
      throw StoreError("trace line " + std::to_string(line_no) +
                       ": missing key");
  };
  if (tag == "U") {
    op.kind = OpKind::kUpdate;
    need_key(op.key);
    std::string hex;
    if (!(in >> hex))
      throw StoreError("trace line " + std::to_string(line_no) +
                       ": missing value");
    op.value = hex == "-" ? std::string() : hex_decode(hex);
  } else if (tag == "G") {
    op.kind = OpKind::kGet;
    need_key(op.key);
  } else if (tag == "D") {
    op.kind = OpKind::kDelete;
    need_key(op.key);
  } else if (tag == "R" || tag == "S") {
    op.kind = tag == "R" ? OpKind::kRangeDelete : OpKind::kScan;
    need_key(op.key);
    need_key(op.key2);
    if (op.key >= op.key2)
      throw StoreError("trace line " + std::to_string(line_no) +
                       ": empty range");
  } else {
    throw StoreError("trace line " + std::to_string(line_no) +
                     ": unknown op '" + tag + "'");
  }
  std::string extra;
  if (in >> extra)
    throw StoreError("trace line " + std::to_string(line_no) +
                     ": trailing tokens");
  return op;
}

std::vector<Operation> load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StoreError("cannot open trace file: " + path);
  std::vector<Operation> ops;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ops.push_back(parse_operation(line, line_no));
  }
  return ops;
}

void write_trace_file(const std::string& path,
                      const std::vector<Operation>& ops) {
  std::ofstream out(path);
  if (!out) throw StoreError("cannot write trace file: " + path);
  for (const auto& op : ops) out << format_operation(op) << "\n";
}

}  // namespace gloran
