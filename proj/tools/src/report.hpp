#pragma once

#include <string>
#include <utility>
#include <vector>

#include "heunlim/matrix.hpp"

namespace heunlim::cli {

// Insertion-ordered JSON document. The artifacts double as regression
// baselines and get diffed byte for byte, so object members keep the order
// they were added in and every double goes through the same 17-digit
// formatter in both renderers. That requirement is also why this is not
// an off-the-shelf JSON library: those pick their own float representation.
class Json {
public:
    static Json object();
    static Json array();
    static Json null();
    static Json number(double v);
    static Json integer(long long v);
    static Json boolean(bool v);
    static Json text(std::string v);
    static Json series(const std::vector<double>& v);
    static Json series(const std::vector<int>& v);
    static Json table(const Matrix& m);  // array of row arrays

    Json& set(std::string key, Json v);  // object member; duplicate keys are a bug
    Json& push(Json v);                  // array element

    // Pretty JSON, two-space indent, LF line ends, UTF-8 passthrough.
    std::string render_json() const;

    // RFC 4180 flattening: header "key,i,j,value", CRLF line ends. Scalars
    // leave i and j empty, flat numeric arrays fill i, matrices fill both;
    // arrays of objects recurse with the index folded into the key.
    std::string render_csv() const;

private:
    enum class Kind { null, boolean, integer, number, text, array, object };
    Kind kind_ = Kind::null;
    bool bool_ = false;
    long long int_ = 0;
    double num_ = 0.0;
    std::string text_;
    std::vector<Json> items_;
    std::vector<std::pair<std::string, Json>> members_;

    void write_json(std::string& out, int depth) const;
    void write_csv_rows(std::string& out, const std::string& path) const;
    bool scalar() const { return kind_ != Kind::array && kind_ != Kind::object; }
    std::string scalar_literal() const;
};

// %.17g with non-finite values mapped to null (JSON has no literal for them).
std::string format_double(double v);

}  // namespace heunlim::cli
