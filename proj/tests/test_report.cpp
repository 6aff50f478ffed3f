#include "report.hpp"

#include <string>

#include "doctest.h"
#include "heunlim/matrix.hpp"

using heunlim::Matrix;
using heunlim::cli::format_double;
using heunlim::cli::Json;

TEST_CASE("doubles render with 17 significant digits in both formats") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-6149.0 / 11109.0) == "-0.55351516788189759");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(std::nan("")) == "null");

    Json doc = Json::object().set("x", Json::number(0.1));
    CHECK(doc.render_json() == "{\n  \"x\": 0.10000000000000001\n}\n");
    CHECK(doc.render_csv() == "key,i,j,value\r\nx,,,0.10000000000000001\r\n");
}

TEST_CASE("json rendering keeps insertion order and escapes strings") {
    Json doc = Json::object();
    doc.set("zeta", Json::integer(3));
    doc.set("alpha", Json::text("line\nbreak \"quoted\""));
    doc.set("flag", Json::boolean(true));
    doc.set("nothing", Json::null());
    const std::string body = doc.render_json();

    CHECK(body.find("\"zeta\"") < body.find("\"alpha\""));
    CHECK(body.find("\"alpha\"") < body.find("\"flag\""));
    CHECK(body.find("\\n") != std::string::npos);
    CHECK(body.find("\\\"quoted\\\"") != std::string::npos);
    CHECK(body.find("true") != std::string::npos);
    CHECK(body.find("null") != std::string::npos);

    SUBCASE("nested structures indent by two spaces") {
        Json outer = Json::object().set(
            "inner", Json::object().set("k", Json::integer(1)));
        CHECK(outer.render_json() ==
              "{\n  \"inner\": {\n    \"k\": 1\n  }\n}\n");
    }
    SUBCASE("empty containers render compactly") {
        Json o = Json::object()
                     .set("empty_obj", Json::object())
                     .set("empty_arr", Json::array());
        CHECK(o.render_json() ==
              "{\n  \"empty_obj\": {},\n  \"empty_arr\": []\n}\n");
    }
}

TEST_CASE("csv flattening fills the index columns by shape") {
    Matrix m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = 2.0;
    m(1, 0) = 3.0;
    m(1, 1) = 4.0;
    Json doc = Json::object();
    doc.set("scalar", Json::number(5.0));
    doc.set("series", Json::series(std::vector<double>{7.0, 8.0}));
    doc.set("grid", Json::table(m));
    doc.set("rows", Json::array()
                        .push(Json::object().set("name", Json::text("a")))
                        .push(Json::object().set("name", Json::text("b"))));

    CHECK(doc.render_csv() ==
          "key,i,j,value\r\n"
          "scalar,,,5\r\n"
          "series,0,,7\r\n"
          "series,1,,8\r\n"
          "grid,0,0,1\r\n"
          "grid,0,1,2\r\n"
          "grid,1,0,3\r\n"
          "grid,1,1,4\r\n"
          "rows.0.name,,,a\r\n"
          "rows.1.name,,,b\r\n");
}

TEST_CASE("csv fields with separators are quoted per RFC 4180") {
    Json doc = Json::object().set("msg", Json::text("a,b \"c\"\r\nd"));
    CHECK(doc.render_csv() ==
          "key,i,j,value\r\nmsg,,,\"a,b \"\"c\"\"\r\nd\"\r\n");
}
