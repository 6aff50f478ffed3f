#include "report.hpp"

#include <cmath>
#include <cstdio>

namespace heunlim::cli {

namespace {

void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void append_csv_field(std::string& out, const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        out += field;
        return;
    }
    out += '"';
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

}  // namespace

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json Json::object() {
    Json j;
    j.kind_ = Kind::object;
    return j;
}

Json Json::array() {
    Json j;
    j.kind_ = Kind::array;
    return j;
}

Json Json::null() { return Json{}; }

Json Json::number(double v) {
    Json j;
    j.kind_ = Kind::number;
    j.num_ = v;
    return j;
}

Json Json::integer(long long v) {
    Json j;
    j.kind_ = Kind::integer;
    j.int_ = v;
    return j;
}

Json Json::boolean(bool v) {
    Json j;
    j.kind_ = Kind::boolean;
    j.bool_ = v;
    return j;
}

Json Json::text(std::string v) {
    Json j;
    j.kind_ = Kind::text;
    j.text_ = std::move(v);
    return j;
}

Json Json::series(const std::vector<double>& v) {
    Json j = array();
    for (const double x : v) j.push(number(x));
    return j;
}

Json Json::series(const std::vector<int>& v) {
    Json j = array();
    for (const int x : v) j.push(integer(x));
    return j;
}

Json Json::table(const Matrix& m) {
    Json j = array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push(number(m(i, k)));
        j.push(std::move(row));
    }
    return j;
}

Json& Json::set(std::string key, Json v) {
    members_.emplace_back(std::move(key), std::move(v));
    return *this;
}

Json& Json::push(Json v) {
    items_.push_back(std::move(v));
    return *this;
}

std::string Json::scalar_literal() const {
    switch (kind_) {
        case Kind::null: return "null";
        case Kind::boolean: return bool_ ? "true" : "false";
        case Kind::integer: return std::to_string(int_);
        case Kind::number: return format_double(num_);
        case Kind::text: return text_;
        default: return {};
    }
}

void Json::write_json(std::string& out, int depth) const {
    const std::string indent(2 * static_cast<std::size_t>(depth), ' ');
    const std::string inner(2 * static_cast<std::size_t>(depth + 1), ' ');
    switch (kind_) {
        case Kind::text:
            append_escaped(out, text_);
            break;
        case Kind::array: {
            if (items_.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (std::size_t i = 0; i < items_.size(); ++i) {
                out += inner;
                items_[i].write_json(out, depth + 1);
                out += i + 1 < items_.size() ? ",\n" : "\n";
            }
            out += indent + "]";
            break;
        }
        case Kind::object: {
            if (members_.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            for (std::size_t i = 0; i < members_.size(); ++i) {
                out += inner;
                append_escaped(out, members_[i].first);
                out += ": ";
                members_[i].second.write_json(out, depth + 1);
                out += i + 1 < members_.size() ? ",\n" : "\n";
            }
            out += indent + "}";
            break;
        }
        default:
            out += scalar_literal();
    }
}

std::string Json::render_json() const {
    std::string out;
    write_json(out, 0);
    out += '\n';
    return out;
}

void Json::write_csv_rows(std::string& out, const std::string& path) const {
    const auto emit_row = [&out](const std::string& key, const std::string& i,
                                 const std::string& j, const std::string& value) {
        append_csv_field(out, key);
        out += ',';
        out += i;
        out += ',';
        out += j;
        out += ',';
        append_csv_field(out, value);
        out += "\r\n";
    };

    switch (kind_) {
        case Kind::object:
            for (const auto& [key, value] : members_)
                value.write_csv_rows(out, path.empty() ? key : path + "." + key);
            break;
        case Kind::array: {
            bool flat = true, tabular = !items_.empty();
            for (const Json& item : items_) {
                flat = flat && item.scalar();
                tabular = tabular && item.kind_ == Kind::array;
                if (tabular)
                    for (const Json& cell : item.items_)
                        tabular = tabular && cell.scalar();
            }
            if (flat) {
                for (std::size_t i = 0; i < items_.size(); ++i)
                    emit_row(path, std::to_string(i), "", items_[i].scalar_literal());
            } else if (tabular) {
                for (std::size_t i = 0; i < items_.size(); ++i)
                    for (std::size_t j = 0; j < items_[i].items_.size(); ++j)
                        emit_row(path, std::to_string(i), std::to_string(j),
                                 items_[i].items_[j].scalar_literal());
            } else {
                for (std::size_t i = 0; i < items_.size(); ++i)
                    items_[i].write_csv_rows(out, path + "." + std::to_string(i));
            }
            break;
        }
        default:
            emit_row(path, "", "", scalar_literal());
    }
}

std::string Json::render_csv() const {
    std::string out = "key,i,j,value\r\n";
    write_csv_rows(out, "");
    return out;
}

}  // namespace heunlim::cli
