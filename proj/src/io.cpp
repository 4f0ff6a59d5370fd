#include "fracvar/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

namespace fracvar {

namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            return parts;
        start = pos + 1;
    }
}

std::optional<double> to_real(std::string_view s)
{
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
    if (ec != std::errc() || ptr != last || first == last || !std::isfinite(v))
        return std::nullopt;
    return v;
}

struct Entry {
    std::string value;
    std::size_t line;
};

using Section = std::map<std::string, Entry, std::less<>>;

class Reader {
public:
    Reader(std::string_view origin, std::map<std::string, Section, std::less<>> sections)
        : origin_(origin), sections_(std::move(sections))
    {
    }

    [[noreturn]] void fail(std::string_view section, std::string_view key, const std::string& msg) const
    {
        std::string where(origin_);
        where += ": [" + std::string(section) + "]";
        if (!key.empty())
            where += " " + std::string(key);
        throw FileFormatError(where + ": " + msg);
    }

    bool has_section(std::string_view s) const { return sections_.count(s) != 0; }
    bool has(std::string_view s, std::string_view k) const
    {
        auto it = sections_.find(s);
        return it != sections_.end() && it->second.count(k) != 0;
    }

    const std::string& text(std::string_view s, std::string_view k) const
    {
        auto it = sections_.find(s);
        if (it == sections_.end() || it->second.count(k) == 0)
            fail(s, k, "missing required key");
        return it->second.find(k)->second.value;
    }

    double real(std::string_view s, std::string_view k) const
    {
        auto v = to_real(text(s, k));
        if (!v)
            fail(s, k, "expected a decimal real, got '" + text(s, k) + "'");
        return *v;
    }

    Expression expression(std::string_view s, std::string_view k) const
    {
        try {
            return parse(text(s, k));
        } catch (const ParseError& e) {
            fail(s, k, std::string("expression error ") + e.what());
        }
    }

    std::vector<std::optional<double>> endpoint(std::string_view k, std::size_t components) const
    {
        const auto parts = split(text("problem", k), ',');
        if (parts.size() != components)
            fail("problem", k,
                 "expected " + std::to_string(components) + " value(s), got " +
                     std::to_string(parts.size()));
        std::vector<std::optional<double>> out;
        for (auto p : parts) {
            if (p == "free") {
                out.emplace_back(std::nullopt);
            } else if (auto v = to_real(p)) {
                out.emplace_back(*v);
            } else {
                fail("problem", k, "expected a real or 'free', got '" + std::string(p) + "'");
            }
        }
        return out;
    }

private:
    std::string_view origin_;
    std::map<std::string, Section, std::less<>> sections_;
};

const std::map<std::string, std::vector<std::string>, std::less<>>& allowed_keys()
{
    static const std::map<std::string, std::vector<std::string>, std::less<>> keys = {
        {"problem", {"a", "b", "alpha", "alpha1", "alpha2", "lagrangian", "x_a", "x_b"}},
        {"constraint", {"kind", "integrand", "level", "g"}},
        {"solver", {"n", "tol", "max_iter"}},
    };
    return keys;
}

} // namespace

ProblemSpec parse_problem_text(std::string_view text, std::string_view origin)
{
    std::map<std::string, Section, std::less<>> sections;
    std::string current;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    auto fail_line = [&](const std::string& msg) {
        throw FileFormatError(std::string(origin) + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail_line("malformed section header");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            if (!allowed_keys().count(current))
                fail_line("unknown section [" + current + "]");
            if (sections.count(current))
                fail_line("duplicate section [" + current + "]");
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail_line("expected 'key = value'");
        if (current.empty())
            fail_line("key outside of any section");
        const std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        const auto& allowed = allowed_keys().at(current);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw FileFormatError(std::string(origin) + ": [" + current + "] " + key +
                                  ": unknown key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        else if (!value.empty() && value.front() == '"')
            throw FileFormatError(std::string(origin) + ": [" + current + "] " + key +
                                  ": unterminated quote");
        auto& section = sections[current];
        if (section.count(key))
            throw FileFormatError(std::string(origin) + ": [" + current + "] " + key +
                                  ": duplicate key");
        section.emplace(key, Entry{std::string(value), line_no});
    }

    const Reader r(origin, std::move(sections));
    if (!r.has_section("problem"))
        throw FileFormatError(std::string(origin) + ": missing [problem] section");

    const bool two = r.has("problem", "alpha1") || r.has("problem", "alpha2");
    if (two && r.has("problem", "alpha"))
        r.fail("problem", "alpha", "give either alpha or alpha1/alpha2, not both");

    const double a = r.real("problem", "a");
    const double b = r.real("problem", "b");
    std::vector<FracOrder> orders;
    auto order = [&](std::string_view key) {
        const double v = r.real("problem", key);
        if (!(v > 0.0 && v <= 1.0))
            r.fail("problem", key, "order must lie in (0, 1]");
        return FracOrder(v);
    };
    if (two) {
        orders = {order("alpha1"), order("alpha2")};
    } else {
        orders = {order("alpha")};
    }
    const std::size_t m = two ? 2 : 1;

    Expression lexpr = r.expression("problem", "lagrangian");
    std::optional<Lagrangian> lag;
    try {
        lag = two ? Lagrangian::two_component(lexpr) : Lagrangian::scalar(lexpr);
    } catch (const std::invalid_argument& e) {
        r.fail("problem", "lagrangian", e.what());
    }

    const auto left = r.endpoint("x_a", m);
    const auto right = r.endpoint("x_b", m);
    std::vector<BoundaryCondition> boundary;
    for (std::size_t i = 0; i < m; ++i)
        boundary.push_back({left[i], right[i]});

    Constraint constraint;
    if (r.has_section("constraint")) {
        const std::string& kind = r.text("constraint", "kind");
        if (kind == "isoperimetric") {
            if (r.has("constraint", "g"))
                r.fail("constraint", "g", "not valid for an isoperimetric constraint");
            Expression mexpr = r.expression("constraint", "integrand");
            try {
                constraint = IsoperimetricConstraint{
                    two ? Lagrangian::two_component(mexpr) : Lagrangian::scalar(mexpr),
                    r.real("constraint", "level")};
            } catch (const std::invalid_argument& e) {
                r.fail("constraint", "integrand", e.what());
            }
        } else if (kind == "holonomic") {
            for (auto k : {"integrand", "level"})
                if (r.has("constraint", k))
                    r.fail("constraint", k, "not valid for a holonomic constraint");
            Expression gexpr = r.expression("constraint", "g");
            try {
                constraint = HolonomicConstraint{Lagrangian::holonomic(gexpr)};
            } catch (const std::invalid_argument& e) {
                r.fail("constraint", "g", e.what());
            }
        } else {
            r.fail("constraint", "kind", "expected 'isoperimetric' or 'holonomic', got '" + kind + "'");
        }
    }

    ProblemSpec spec{
        VariationalProblem{
            .name = std::string(origin),
            .a = a,
            .b = b,
            .layout = two ? Layout::two_component : Layout::scalar,
            .orders = std::move(orders),
            .lagrangian = std::move(*lag),
            .boundary = std::move(boundary),
            .constraint = std::move(constraint),
            .exact_solution = std::nullopt,
        },
        {}};
    try {
        spec.problem.validate();
    } catch (const std::invalid_argument& e) {
        r.fail("problem", "", e.what());
    }

    if (r.has("solver", "n")) {
        const double n = r.real("solver", "n");
        if (!(n >= 2.0) || n != std::floor(n) || n > 1e7)
            r.fail("solver", "n", "expected an integer >= 2");
        spec.solver.n = static_cast<std::size_t>(n);
    }
    if (r.has("solver", "tol")) {
        const double tol = r.real("solver", "tol");
        if (!(tol > 0.0))
            r.fail("solver", "tol", "must be positive");
        spec.solver.tol = tol;
    }
    if (r.has("solver", "max_iter")) {
        const double it = r.real("solver", "max_iter");
        if (!(it >= 0.0) || it != std::floor(it) || it > 1e9)
            r.fail("solver", "max_iter", "expected a non-negative integer");
        spec.solver.max_iter = static_cast<int>(it);
    }
    return spec;
}

ProblemSpec read_problem_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw FileFormatError(path.string() + ": cannot open problem file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str(), path.string());
}

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string s(buf);
    if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos)
        s += ".0";
    return s;
}

namespace {

std::string csv_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

void write_solution(std::ostream& out, const Trajectory& x,
                    const std::optional<std::string>& diagnostics)
{
    std::string text = x.size() == 1 ? "t,x\n" : "t,x1,x2\n";
    for (std::size_t j = 0; j < x.grid.size(); ++j) {
        text += csv_number(x.grid.node(j));
        for (const auto& c : x.components) {
            text += ',';
            text += csv_number(c[j]);
        }
        text += '\n';
    }
    if (diagnostics) {
        std::string d = *diagnostics;
        std::replace(d.begin(), d.end(), '\n', ' ');
        text += "# " + d + "\n";
    }
    out << text;
}

Trajectory read_solution(std::istream& in, std::string_view origin)
{
    auto fail = [&](std::size_t line, const std::string& msg) -> void {
        throw FileFormatError(std::string(origin) + ":" + std::to_string(line) + ": " + msg);
    };
    std::string raw;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    std::vector<double> t;
    std::vector<std::vector<double>> cols;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const auto fields = split(line, ',');
        if (columns == 0) {
            if (line == "t,x")
                columns = 1;
            else if (line == "t,x1,x2")
                columns = 2;
            else
                fail(line_no, "expected header 't,x' or 't,x1,x2'");
            cols.resize(columns);
            continue;
        }
        if (fields.size() != columns + 1)
            fail(line_no, "expected " + std::to_string(columns + 1) + " fields");
        std::vector<double> row;
        for (auto f : fields) {
            auto v = to_real(f);
            if (!v)
                fail(line_no, "malformed number '" + std::string(f) + "'");
            row.push_back(*v);
        }
        t.push_back(row[0]);
        for (std::size_t c = 0; c < columns; ++c)
            cols[c].push_back(row[c + 1]);
    }
    if (columns == 0)
        fail(line_no, "missing header");
    if (t.size() < 3)
        fail(line_no, "need at least 3 rows");
    const Grid grid(t.front(), t.back(), t.size() - 1);
    const double tol = 1e-9 * std::max({std::abs(grid.a()), std::abs(grid.b()), grid.b() - grid.a()});
    for (std::size_t j = 0; j < t.size(); ++j)
        if (std::abs(t[j] - grid.node(j)) > tol)
            throw FileFormatError(std::string(origin) + ": t column is not a uniform grid (row " +
                                  std::to_string(j + 1) + ")");
    std::vector<SampledSignal> comps;
    for (auto& c : cols)
        comps.emplace_back(grid, std::move(c));
    return Trajectory(std::move(comps));
}

} // namespace fracvar
