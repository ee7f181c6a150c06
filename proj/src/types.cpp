#include "gloran/types.hpp"

#include <fstream>
#include <sstream>

namespace gloran {

namespace {

bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kDecomp: return "decomp";
    case Strategy::kScanDelete: return "scan_delete";
    case Strategy::kLookupDelete: return "lookup_delete";
    case Strategy::kLrr: return "lrr";
    case Strategy::kGloran: return "gloran";
  }
  return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "decomp") return Strategy::kDecomp;
  if (name == "scan_delete") return Strategy::kScanDelete;
  if (name == "lookup_delete") return Strategy::kLookupDelete;
  if (name == "lrr") return Strategy::kLrr;
  if (name == "gloran") return Strategy::kGloran;
  throw StoreError("unknown strategy: " + name);
}

void StoreConfig::validate() const {
  if (size_ratio < 2) throw StoreError("config: T must be >= 2");
  if (drtree_fanout < 2) throw StoreError("config: D must be >= 2");
  if (block_size < entry_width) throw StoreError("config: B must be >= e");
  if (memtable_capacity < 1) throw StoreError("config: F must be >= 1");
  if (index_buffer_capacity < 1) throw StoreError("config: F' must be >= 1");
  if (index_size_ratio < 2) throw StoreError("config: T' must be >= 2");
  if (!is_power_of_two(key_universe))
    throw StoreError("config: U must be a power of two");
  if (entry_width < key_width + 9)
    throw StoreError("config: e must fit key, seq and kind");
  if (key_width < 8 || key_width > 255)
    throw StoreError("config: k must be in [8, 255]");
  // A DR-tree node (count word plus D child slots) must fit in one block.
  if (8 + drtree_fanout * (2 * key_width + 24) > block_size)
    throw StoreError("config: DR-tree node does not fit in a block");
  if (bloom_bits_per_entry <= 0 || eve_bits_per_record <= 0)
    throw StoreError("config: bloom bits must be positive");
}

StoreConfig parse_config_text(const std::string& text) {
  StoreConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw StoreError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    try {
      if (key == "memtable_capacity") cfg.memtable_capacity = std::stoull(val);
      else if (key == "size_ratio") cfg.size_ratio = std::stoull(val);
      else if (key == "block_size") cfg.block_size = std::stoull(val);
      else if (key == "key_width") cfg.key_width = std::stoull(val);
      else if (key == "entry_width") cfg.entry_width = std::stoull(val);
      else if (key == "bloom_bits_per_entry")
        cfg.bloom_bits_per_entry = std::stod(val);
      else if (key == "key_universe") cfg.key_universe = std::stoull(val);
      else if (key == "strategy") cfg.strategy = strategy_from_string(val);
      else if (key == "index_buffer_capacity")
        cfg.index_buffer_capacity = std::stoull(val);
      else if (key == "index_size_ratio")
        cfg.index_size_ratio = std::stoull(val);
      else if (key == "drtree_fanout") cfg.drtree_fanout = std::stoull(val);
      else if (key == "eve_first_capacity")
        cfg.eve_first_capacity = std::stoull(val);
      else if (key == "eve_bits_per_record")
        cfg.eve_bits_per_record = std::stod(val);
      else if (key == "decomp_max_expansion")
        cfg.decomp_max_expansion = std::stoull(val);
      else
        throw StoreError("config line " + std::to_string(line_no) +
                         ": unknown key '" + key + "'");
    } catch (const StoreError&) {
      throw;
    } catch (const std::exception&) {
      throw StoreError("config line " + std::to_string(line_no) +
                       ": bad value for '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

StoreConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StoreError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_text(const StoreConfig& cfg) {
  std::ostringstream out;
  out << "memtable_capacity = " << cfg.memtable_capacity << "\n"
      << "size_ratio = " << cfg.size_ratio << "\n"
      << "block_size = " << cfg.block_size << "\n"
      << "key_width = " << cfg.key_width << "\n"
      << "entry_width = " << cfg.entry_width << "\n"
      << "bloom_bits_per_entry = " << cfg.bloom_bits_per_entry << "\n"
      << "key_universe = " << cfg.key_universe << "\n"
      << "strategy = " << to_string(cfg.strategy) << "\n"
      << "index_buffer_capacity = " << cfg.index_buffer_capacity << "\n"
      << "index_size_ratio = " << cfg.index_size_ratio << "\n"
      << "drtree_fanout = " << cfg.drtree_fanout << "\n"
      << "eve_first_capacity = " << cfg.eve_first_capacity << "\n"
      << "eve_bits_per_record = " << cfg.eve_bits_per_record << "\n"
      << "decomp_max_expansion = " << cfg.decomp_max_expansion << "\n";
  return out.str();
}

}  // namespace gloran
