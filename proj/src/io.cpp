#include "gl3ff/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gl3 {

namespace {

const Json& member(const Json& j, const std::string& key, const std::string& field) {
  if (!j.is_object()) throw ParseError(field.empty() ? "document" : field, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(field.empty() ? key : field + "." + key, "missing");
  return *it;
}

std::string sub(const std::string& field, const std::string& key) { return field.empty() ? key : field + "." + key; }

std::vector<Complex> parse_list(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, "expected a list of [re, im] pairs");
  std::vector<Complex> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(parse_complex(j[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

int parse_index(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ParseError(field, "expected an integer in 1..3");
  const int v = j.get<int>();
  if (v < 1 || v > 3) throw ParseError(field, "expected an integer in 1..3");
  return v;
}

Json list_json(const ParamSet& p) {
  Json a = Json::array();
  for (Complex z : p.values) a.push_back(complex_json(z));
  return a;
}

}  // namespace

Complex parse_complex(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(field, "expected [re, im]");
  const Complex z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ParseError(field, "not finite");
  return z;
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

ChainSpec parse_chain_spec(const Json& j) {
  ChainSpec s;
  const Json& L = member(j, "L", "");
  if (!L.is_number_integer() || L.get<long long>() < 1 || L.get<long long>() > static_cast<long long>(kMaxSites))
    throw ParseError("L", "expected an integer in 1.." + std::to_string(kMaxSites));
  s.xi = parse_list(member(j, "xi", ""), "xi");
  if (s.xi.size() != L.get<std::size_t>())
    throw ParseError("xi", "has " + std::to_string(s.xi.size()) + " entries, L is " + std::to_string(L.get<long long>()));
  if (j.contains("c")) s.c = parse_complex(j["c"], "c");
  if (s.c == Complex(0.0)) throw ParseError("c", "must be nonzero");
  if (j.contains("kappa")) {
    const std::vector<Complex> k = parse_list(j["kappa"], "kappa");
    if (k.size() != 3) throw ParseError("kappa", "expected three pairs");
    for (std::size_t n = 0; n < 3; ++n) {
      if (k[n] == Complex(0.0)) throw ParseError("kappa[" + std::to_string(n) + "]", "must be nonzero");
      s.kappa[n] = k[n];
    }
  }
  if (j.contains("orientation")) {
    const Json& o = j["orientation"];
    if (o == "direct")
      s.orientation = Orientation::Direct;
    else if (o == "phi_image")
      s.orientation = Orientation::PhiImage;
    else
      throw ParseError("orientation", "expected \"direct\" or \"phi_image\"");
  }
  return s;
}

Json chain_spec_json(const ChainSpec& s) {
  Json j;
  j["L"] = s.sites();
  Json xi = Json::array();
  for (Complex x : s.xi) xi.push_back(complex_json(x));
  j["xi"] = xi;
  j["c"] = complex_json(s.c);
  j["kappa"] = Json::array({complex_json(s.kappa[0]), complex_json(s.kappa[1]), complex_json(s.kappa[2])});
  j["orientation"] = s.orientation == Orientation::Direct ? "direct" : "phi_image";
  return j;
}

BetheRoots parse_roots(const Json& j, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, "expected an object with u and v");
  BetheRoots r;
  if (j.contains("u")) r.u = ParamSet(parse_list(j["u"], sub(field, "u")));
  if (j.contains("v")) r.v = ParamSet(parse_list(j["v"], sub(field, "v")));
  if (r.a() > kMaxRoots || r.b() > kMaxRoots) throw ParseError(field, "too many roots");
  if (j.contains("residual") && j["residual"].is_number()) r.residual = j["residual"].get<double>();
  return r;
}

Json roots_json(const BetheRoots& r) {
  Json j;
  j["u"] = list_json(r.u);
  j["v"] = list_json(r.v);
  j["residual"] = r.residual;
  return j;
}

FormFactorJob parse_request(const Json& j) {
  FormFactorJob job;
  job.req.i = parse_index(member(j, "i", ""), "i");
  job.req.j = parse_index(member(j, "j", ""), "j");
  job.req.z = parse_complex(member(j, "z", ""), "z");
  job.req.C = parse_roots(member(j, "C", ""), "C");
  job.req.B = parse_roots(member(j, "B", ""), "B");
  if (j.contains("path")) {
    const Json& p = j["path"];
    if (p == "oracle")
      job.path = RequestPath::Oracle;
    else if (p == "det")
      job.path = RequestPath::Det;
    else if (p == "both")
      job.path = RequestPath::Both;
    else
      throw ParseError("path", "expected \"oracle\", \"det\" or \"both\"");
  }
  if (j.contains("limit")) {
    if (!j["limit"].is_boolean()) throw ParseError("limit", "expected true or false");
    job.limit = j["limit"].get<bool>();
  }
  return job;
}

Json request_json(const FormFactorJob& job) {
  Json j;
  j["i"] = job.req.i;
  j["j"] = job.req.j;
  j["z"] = complex_json(job.req.z);
  j["C"] = roots_json(job.req.C);
  j["B"] = roots_json(job.req.B);
  j["path"] = job.path == RequestPath::Oracle ? "oracle" : job.path == RequestPath::Det ? "det" : "both";
  j["limit"] = job.limit;
  return j;
}

Json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError(p.string(), "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(p.string(), e.what());
  }
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_complex(Complex z) {
  std::string im = format_double(z.imag());
  if (im[0] != '-') im = "+" + im;
  return format_double(z.real()) + im + "i";
}

CsvTable::CsvTable(std::string name, int version, std::vector<std::string> columns)
    : name_(std::move(name)), version_(version), columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw SizeError("row has " + std::to_string(cells.size()) + " cells");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  os << "# gl3ff " << name_ << " v" << version_ << "\n";
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const bool quote = cells[k].find_first_of(",\"\n") != std::string::npos;
      if (k) os << ',';
      if (!quote) {
        os << cells[k];
        continue;
      }
      os << '"';
      for (char ch : cells[k]) os << (ch == '"' ? "\"\"" : std::string(1, ch));
      os << '"';
    }
    os << "\n";
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

}  // namespace gl3
