#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gl3ff/formfactor.hpp"

namespace gl3 {

using Json = nlohmann::ordered_json;

// Complex scalars are [re, im]; a bare number is read as real.
Complex parse_complex(const Json& j, const std::string& field);
Json complex_json(Complex z);

// Keys: L, xi, c, kappa (three pairs, optional), orientation ("direct" | "phi_image", optional).
ChainSpec parse_chain_spec(const Json& j);
Json chain_spec_json(const ChainSpec& s);

// Keys: u, v (lists of pairs), optional residual.
BetheRoots parse_roots(const Json& j, const std::string& field);
Json roots_json(const BetheRoots& r);

enum class RequestPath { Oracle, Det, Both };

struct FormFactorJob {
  FormFactorRequest req;
  RequestPath path = RequestPath::Both;
  bool limit = false;  // allow a designated coinciding v pair in F12
};

// Keys: i, j, z, C, B, path (optional), limit (optional).
FormFactorJob parse_request(const Json& j);
Json request_json(const FormFactorJob& job);

Json read_json_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);

// Shortest round-trip decimal form, identical on every run.
std::string format_double(double x);
// re+imi with format_double parts
std::string format_complex(Complex z);

// CSV with a schema line "# gl3ff <name> v<version>" followed by the header row.
class CsvTable {
 public:
  CsvTable(std::string name, int version, std::vector<std::string> columns);
  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::string name_;
  int version_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace gl3
