#include "reachunder/io.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace reachunder {

using nlohmann::json;

namespace {

/// Semantic error tied to a JSON pointer; converted to a SpecError once the
/// pointer is resolved to a source position.
class PathError : public std::invalid_argument {
public:
    PathError(std::string pointer, const std::string& message)
        : std::invalid_argument(message), pointer_(std::move(pointer))
    {
    }
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

// Maps each JSON pointer of an already-valid document to the byte offset
// where its value starts.
class PositionIndex {
public:
    explicit PositionIndex(const std::string& text) : text_(text) { value(""); }

    std::size_t find(std::string pointer) const
    {
        while (true) {
            auto it = offsets_.find(pointer);
            if (it != offsets_.end()) {
                return it->second;
            }
            const auto slash = pointer.rfind('/');
            if (slash == std::string::npos || pointer.empty()) {
                return 0;
            }
            pointer.resize(slash);
        }
    }

private:
    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    std::string string_token()
    {
        std::string out;
        ++pos_;  // opening quote
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\') {
                ++pos_;
            }
            if (pos_ < text_.size()) {
                out.push_back(text_[pos_++]);
            }
        }
        ++pos_;
        return out;
    }

    void value(const std::string& pointer)
    {
        skip_ws();
        offsets_.emplace(pointer, pos_);
        if (pos_ >= text_.size()) {
            return;
        }
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            skip_ws();
            while (pos_ < text_.size() && text_[pos_] != '}') {
                skip_ws();
                std::string key = string_token();
                skip_ws();
                ++pos_;  // colon
                value(pointer + "/" + key);
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ',') {
                    ++pos_;
                    skip_ws();
                }
            }
            ++pos_;
        } else if (c == '[') {
            ++pos_;
            skip_ws();
            int index = 0;
            while (pos_ < text_.size() && text_[pos_] != ']') {
                value(pointer + "/" + std::to_string(index++));
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ',') {
                    ++pos_;
                    skip_ws();
                }
            }
            ++pos_;
        } else if (c == '"') {
            string_token();
        } else {
            while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' &&
                   text_[pos_] != ']' && !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    std::map<std::string, std::size_t> offsets_;
};

std::pair<int, int> line_column(const std::string& text, std::size_t offset)
{
    int line = 1;
    int column = 1;
    for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

/// Start of the lexeme whose last character is at `pos`.
std::size_t token_start(const std::string& text, std::size_t pos)
{
    if (pos >= text.size()) {
        return pos;
    }
    while (pos > 0 && std::isspace(static_cast<unsigned char>(text[pos]))) {
        --pos;
    }
    if (text[pos] == '"') {
        std::size_t k = pos;
        while (k > 0) {
            --k;
            if (text[k] == '"' && (k == 0 || text[k - 1] != '\\')) {
                return k;
            }
        }
        return pos;
    }
    auto lexeme = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
    };
    std::size_t k = pos;
    while (k > 0 && lexeme(text[k]) && lexeme(text[k - 1])) {
        --k;
    }
    return k;
}

const json& member(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.is_object()) {
        throw PathError(where, "expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw PathError(where, "missing required key '" + key + "'");
    }
    return *it;
}

double number(const json& j, const std::string& where)
{
    if (!j.is_number()) {
        throw PathError(where, "expected a number");
    }
    return j.get<double>();
}

int integer(const json& j, const std::string& where)
{
    if (!j.is_number_integer()) {
        throw PathError(where, "expected an integer");
    }
    return j.get<int>();
}

Vector vector_at(const json& j, const std::string& where)
{
    if (!j.is_array() || j.empty()) {
        throw PathError(where, "expected a non-empty array of numbers");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        v[static_cast<Eigen::Index>(k)] = number(j[k], where + "/" + std::to_string(k));
    }
    return v;
}

Matrix matrix_at(const json& j, const std::string& where)
{
    if (!j.is_array() || j.empty()) {
        throw PathError(where, "expected a non-empty array of rows");
    }
    std::vector<Vector> rows;
    for (std::size_t r = 0; r < j.size(); ++r) {
        rows.push_back(vector_at(j[r], where + "/" + std::to_string(r)));
        if (rows.back().size() != rows.front().size()) {
            throw PathError(where + "/" + std::to_string(r), "ragged matrix row");
        }
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    }
    return m;
}

Zonotope zonotope_at(const json& j, const std::string& where)
{
    const Vector c = vector_at(member(j, "center", where), where + "/center");
    const auto gen_it = j.find("generators");
    if (gen_it == j.end() || gen_it->empty()) {
        return Zonotope(c);
    }
    if (!gen_it->is_array()) {
        throw PathError(where + "/generators", "expected an array of generator vectors");
    }
    Matrix g(c.size(), static_cast<Eigen::Index>(gen_it->size()));
    for (std::size_t k = 0; k < gen_it->size(); ++k) {
        const std::string p = where + "/generators/" + std::to_string(k);
        const Vector v = vector_at((*gen_it)[k], p);
        if (v.size() != c.size()) {
            throw PathError(p, "generator dimension differs from the center's");
        }
        g.col(static_cast<Eigen::Index>(k)) = v;
    }
    try {
        return Zonotope(c, g);
    } catch (const std::invalid_argument& e) {
        throw PathError(where, e.what());
    }
}

enum class Role { state_matrix, input_matrix };

MatrixProvider provider_at(const json& j, const std::string& where, Role role)
{
    const json& kind_j = member(j, "kind", where);
    if (!kind_j.is_string()) {
        throw PathError(where + "/kind", "expected a string");
    }
    const std::string kind = kind_j.get<std::string>();
    try {
        if (kind == "constant") {
            return MatrixProvider::constant(matrix_at(member(j, "matrix", where), where + "/matrix"));
        }
        if (kind == "piecewise_constant") {
            const json& segs = member(j, "segments", where);
            if (!segs.is_array() || segs.empty()) {
                throw PathError(where + "/segments", "expected a non-empty array of segments");
            }
            std::vector<Segment> out;
            for (std::size_t k = 0; k < segs.size(); ++k) {
                const std::string p = where + "/segments/" + std::to_string(k);
                out.push_back({number(member(segs[k], "until", p), p + "/until"),
                               matrix_at(member(segs[k], "matrix", p), p + "/matrix")});
            }
            return MatrixProvider::piecewise_constant(std::move(out));
        }
        if (kind == "builtin") {
            const json& name_j = member(j, "name", where);
            const std::string name = name_j.is_string() ? name_j.get<std::string>() : "";
            const SystemSpec sys = builtin_system(name);
            return role == Role::state_matrix ? sys.A : sys.B;
        }
    } catch (const PathError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw PathError(where, e.what());
    }
    throw PathError(where + "/kind", "unknown provider kind '" + kind +
                                         "' (expected constant, piecewise_constant or builtin)");
}

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

SpecError::SpecError(const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + message
                                  : message),
      line_(line),
      column_(column)
{
}

std::string format_number(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

json zonotope_to_json(const Zonotope& z)
{
    json gens = json::array();
    for (int k = 0; k < z.num_generators(); ++k) {
        gens.push_back(std::vector<double>(z.generators().col(k).begin(),
                                           z.generators().col(k).end()));
    }
    return {{"center", std::vector<double>(z.center().begin(), z.center().end())},
            {"generators", std::move(gens)}};
}

Zonotope zonotope_from_json(const json& j)
{
    try {
        return zonotope_at(j, "");
    } catch (const PathError& e) {
        throw std::invalid_argument(std::string("zonotope") + e.pointer() + ": " + e.what());
    }
}

namespace {

SystemSpec system_from_json_impl(const json& j)
{
    SystemSpec sys;
    if (!j.is_object()) {
        throw PathError("", "system description must be a JSON object");
    }
    sys.n = integer(member(j, "n", ""), "/n");
    sys.m = integer(member(j, "m", ""), "/m");
    if (sys.n <= 0 || sys.m <= 0) {
        throw PathError(sys.n <= 0 ? "/n" : "/m", "dimensions must be positive");
    }
    const json& t = member(j, "t", "");
    if (!t.is_array() || t.size() != 2) {
        throw PathError("/t", "expected [t_lo, t_hi]");
    }
    sys.t_lo = number(t[0], "/t/0");
    sys.t_hi = number(t[1], "/t/1");
    if (!(sys.t_lo < sys.t_hi)) {
        throw PathError("/t", AssumptionError("i", "the time interval must have t_lo < t_hi")
                                  .what());
    }
    sys.A = provider_at(member(j, "A", ""), "/A", Role::state_matrix);
    sys.B = provider_at(member(j, "B", ""), "/B", Role::input_matrix);
    if (sys.A.rows() != sys.n || sys.A.cols() != sys.n) {
        throw PathError("/A", "A must be " + std::to_string(sys.n) + "x" + std::to_string(sys.n));
    }
    if (sys.B.rows() != sys.n || sys.B.cols() != sys.m) {
        throw PathError("/B", "B must be " + std::to_string(sys.n) + "x" + std::to_string(sys.m));
    }
    for (const auto* key : {"A", "B"}) {
        const MatrixProvider& p = key[0] == 'A' ? sys.A : sys.B;
        if (p.kind() == MatrixProvider::Kind::piecewise_constant &&
            p.segments().back().until != sys.t_hi) {
            throw PathError(std::string("/") + key + "/segments",
                            std::string("the last segment of ") + key + " must end at t_hi");
        }
    }
    sys.X0 = zonotope_at(member(j, "X0", ""), "/X0");
    sys.U = zonotope_at(member(j, "U", ""), "/U");
    if (sys.X0.dim() != sys.n) {
        throw PathError("/X0", AssumptionError("v", "X0 must be a set in dimension " +
                                                        std::to_string(sys.n))
                                   .what());
    }
    if (sys.U.dim() != sys.m) {
        throw PathError("/U", AssumptionError("v", "U must be a set in dimension " +
                                                       std::to_string(sys.m))
                                  .what());
    }
    if (auto it = j.find("breakpoints"); it != j.end()) {
        if (!it->is_array()) {
            throw PathError("/breakpoints", "expected an array of times");
        }
        for (std::size_t k = 0; k < it->size(); ++k) {
            sys.extra_breakpoints.push_back(number((*it)[k], "/breakpoints/" + std::to_string(k)));
        }
    }
    if (auto it = j.find("b_exponent"); it != j.end()) {
        sys.b_exponent = it->is_string() && it->get<std::string>() == "inf"
                             ? std::numeric_limits<double>::infinity()
                             : number(*it, "/b_exponent");
    }
    sys.name = j.value("name", std::string("custom"));
    try {
        sys.validate();
    } catch (const std::invalid_argument& e) {
        throw PathError("", e.what());
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(j.dump())));
    sys.fingerprint = std::string("fnv1a:") + buf;
    return sys;
}

}  // namespace

SystemSpec system_from_json(const json& j)
{
    try {
        return system_from_json_impl(j);
    } catch (const PathError& e) {
        const std::string where = e.pointer().empty() ? "document" : e.pointer();
        throw std::invalid_argument(where + ": " + e.what());
    }
}

SystemSpec parse_system(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(text, token_start(text, e.byte > 0 ? e.byte - 1 : 0));
        // drop the library's own position prefix, which points past the token
        std::string detail = e.what();
        if (const auto cut = detail.find("column "); cut != std::string::npos) {
            if (const auto colon = detail.find(": ", cut); colon != std::string::npos) {
                detail = detail.substr(colon + 2);
            }
        }
        throw SpecError("malformed JSON: " + detail, line, column);
    }
    try {
        return system_from_json_impl(j);
    } catch (const PathError& e) {
        const PositionIndex index(text);
        const auto [line, column] = line_column(text, index.find(e.pointer()));
        const std::string where = e.pointer().empty() ? "document" : e.pointer();
        throw SpecError(where + ": " + e.what(), line, column);
    }
}

SystemSpec load_system_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw SpecError("cannot open system file '" + path + "'", 0, 0);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_system(buffer.str());
}

json reach_result_to_json(const ReachResult& result)
{
    json sets = json::array();
    for (const Zonotope& z : result.lambdas) {
        sets.push_back(zonotope_to_json(z));
    }
    return {{"steps", result.steps()},
            {"grid", std::vector<double>(result.grid.points().begin(), result.grid.points().end())},
            {"sets", std::move(sets)},
            {"accuracy_class", result.accuracy.str()},
            {"fingerprint", result.fingerprint}};
}

ReachResult reach_result_from_json(const json& j)
{
    const auto grid = j.at("grid").get<std::vector<double>>();
    if (grid.size() < 2) {
        throw std::invalid_argument("reach result: grid needs at least two points");
    }
    ReachResult result;
    result.grid = TimeGrid(grid.front(), grid.back(), static_cast<int>(grid.size()) - 1);
    for (const json& z : j.at("sets")) {
        result.lambdas.push_back(zonotope_from_json(z));
    }
    if (result.lambdas.size() != grid.size()) {
        throw std::invalid_argument("reach result: set count does not match the grid");
    }
    const std::string acc = j.value("accuracy_class", std::string("exact"));
    result.accuracy.exact = acc == "exact";
    if (!result.accuracy.exact && acc.rfind("tol(", 0) == 0) {
        result.accuracy.tol = std::stod(acc.substr(4));
    }
    result.fingerprint = j.value("fingerprint", std::string());
    return result;
}

void write_outline_csv(std::ostream& out, const ReachResult& result, int directions)
{
    out << "set_index,t,x1,x2\n";
    for (std::size_t i = 0; i < result.lambdas.size(); ++i) {
        const std::string t = format_number(result.grid[static_cast<int>(i)]);
        for (const Vector& p : outline_2d(result.lambdas[i], directions)) {
            out << i << ',' << t << ',' << format_number(p[0]) << ',' << format_number(p[1])
                << '\n';
        }
    }
}

json certification_to_json(const CertificationReport& report)
{
    json failures = json::array();
    for (const auto& f : report.failures) {
        failures.push_back({{"index", f.index}, {"coefficients", f.coefficients}, {"error", f.error}});
    }
    return {{"passed", report.passed},
            {"max_error", report.max_error},
            {"max_set_gap", report.max_set_gap},
            {"tol", report.tol},
            {"trials", report.trials},
            {"extreme_vertices", report.extreme},
            {"seed", report.seed},
            {"checked_indices", report.checked_indices},
            {"witnesses", report.witnesses},
            {"failures", std::move(failures)}};
}

json convergence_to_json(const ConvergenceReport& report)
{
    return {{"mode", to_string(report.mode)},
            {"steps", report.steps},
            {"reference_steps", report.reference_steps},
            {"resolution", report.resolution},
            {"distances", report.distances},
            {"ratios", report.ratios}};
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

}  // namespace reachunder
