#ifndef GLORAN_TRACE_HPP
#define GLORAN_TRACE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gloran/types.hpp"

namespace gloran {

enum class OpKind : std::uint8_t {
  kUpdate,       // U <key> <valhex>
  kGet,          // G <key>
  kDelete,       // D <key>
  kRangeDelete,  // R <lo> <hi>  (half-open)
  kScan,         // S <lo> <hi>  (half-open)
};

struct Operation {
  OpKind kind = OpKind::kUpdate;
  Key key = 0;   // key, or lo for range ops
  Key key2 = 0;  // hi for range ops
  std::string value;
};

std::string format_operation(const Operation& op);
Operation parse_operation(const std::string& line, std::size_t line_no);

std::vector<Operation> load_trace_file(const std::string& path);
void write_trace_file(const std::string& path,
                      const std::vector<Operation>& ops);

std::string hex_encode(const std::string& bytes);
std::string hex_decode(const std::string& hex);

}  // namespace gloran

#endif
