#include "doctest.h"
#include "gl3ff/io.hpp"

using namespace gl3;

namespace {

std::string parse_error_field(const Json& j) {
  try {
    parse_chain_spec(j);
  } catch (const ParseError& e) {
    return e.field;
  }
  return "";
}

}  // namespace

TEST_CASE("complex values are pairs") {
  CHECK(parse_complex(Json::parse("[1.5, -2]"), "z") == Complex(1.5, -2.0));
  CHECK(parse_complex(Json::parse("3"), "z") == Complex(3.0, 0.0));
  CHECK_THROWS_AS(parse_complex(Json::parse("[1]"), "z"), ParseError);
  CHECK_THROWS_AS(parse_complex(Json::parse("\"1\""), "z"), ParseError);
  CHECK(complex_json(Complex(0.25, -1.0)).dump() == "[0.25,-1.0]");
}

TEST_CASE("chain spec round trip") {
  ChainSpec s;
  s.xi = {Complex(0.1, 0.05), Complex(-0.45, 0.2)};
  s.c = Complex(1.0, 0.2);
  s.kappa = {Complex(1.3, 0.4), 1.0, Complex(0.7, -0.5)};
  s.orientation = Orientation::PhiImage;
  const ChainSpec t = parse_chain_spec(chain_spec_json(s));
  CHECK(t.xi == s.xi);
  CHECK(t.c == s.c);
  CHECK(t.kappa == s.kappa);
  CHECK(t.orientation == s.orientation);

  const ChainSpec d = parse_chain_spec(Json::parse(R"({"L": 1, "xi": [[0, 0]]})"));
  CHECK(d.c == Complex(1.0));
  CHECK(d.untwisted());
  CHECK(d.orientation == Orientation::Direct);
}

TEST_CASE("malformed specs name the field") {
  CHECK(parse_error_field(Json::parse(R"({"xi": [[0, 0]]})")) == "L");
  CHECK(parse_error_field(Json::parse(R"({"L": 2, "xi": [[0, 0]]})")) == "xi");
  CHECK(parse_error_field(Json::parse(R"({"L": 9, "xi": []})")) == "L");
  CHECK(parse_error_field(Json::parse(R"({"L": 1, "xi": [[0, "a"]]})")) == "xi[0]");
  CHECK(parse_error_field(Json::parse(R"({"L": 1, "xi": [[0, 0]], "c": [0, 0]})")) == "c");
  CHECK(parse_error_field(Json::parse(R"({"L": 1, "xi": [[0, 0]], "kappa": [[1, 0], [1, 0]]})")) == "kappa");
  CHECK(parse_error_field(Json::parse(R"({"L": 1, "xi": [[0, 0]], "kappa": [[1, 0], [0, 0], [1, 0]]})")) == "kappa[1]");
  CHECK(parse_error_field(Json::parse(R"({"L": 1, "xi": [[0, 0]], "orientation": "up"})")) == "orientation");
  CHECK(parse_error_field(Json::parse("[1, 2]")) == "document");
}

TEST_CASE("requests") {
  const Json j = Json::parse(R"({"i": 1, "j": 3, "z": [0.5, 0.1],
    "C": {"u": [[1, 0]], "v": [[0, 1]]}, "B": {}, "path": "det", "limit": true})");
  const FormFactorJob job = parse_request(j);
  CHECK(job.req.i == 1);
  CHECK(job.req.j == 3);
  CHECK(job.req.C.a() == 1);
  CHECK(job.req.C.b() == 1);
  CHECK(job.req.B.a() == 0);
  CHECK(job.path == RequestPath::Det);
  CHECK(job.limit);
  const FormFactorJob back = parse_request(request_json(job));
  CHECK(back.req.C.u[0] == Complex(1.0));
  CHECK(back.req.z == Complex(0.5, 0.1));

  auto field = [](const char* text) {
    try {
      parse_request(Json::parse(text));
    } catch (const ParseError& e) {
      return e.field;
    }
    return std::string();
  };
  CHECK(field(R"({"i": 4, "j": 1, "z": 0, "C": {}, "B": {}})") == "i");
  CHECK(field(R"({"i": 1, "j": 1, "z": 0, "C": {"u": [[1]]}, "B": {}})") == "C.u[0]");
  CHECK(field(R"({"i": 1, "j": 1, "z": 0, "C": {}})") == "B");
  CHECK(field(R"({"i": 1, "j": 1, "z": 0, "C": {}, "B": {}, "path": "fast"})") == "path");
}

TEST_CASE("number formatting is shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-12) == "1e-12");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_complex(Complex(80.0, 60.0)) == "80+60i");
  CHECK(format_complex(Complex(-0.5, -2.0)) == "-0.5-2i");
}

TEST_CASE("csv tables") {
  CsvTable t("sweep", 1, {"w", "lhs", "rhs", "defect"});
  t.add_row({"1", "a,b", "say \"x\"", "0"});
  CHECK(t.str() == "# gl3ff sweep v1\nw,lhs,rhs,defect\n1,\"a,b\",\"say \"\"x\"\"\",0\n");
  CHECK_THROWS_AS(t.add_row({"1"}), SizeError);
}
