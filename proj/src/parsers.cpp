#include "pmuplace/parsers.hpp"

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pmuplace {

namespace {

struct RawBus {
    int id;
    int type;
    double pd_mw;
    int line;
};

struct RawGen {
    int bus;
    double pg_mw;
    bool in_service;
    int line;
};

struct RawBranch {
    int from_id;
    int to_id;
    double x;
    double tap;   // 0 = unset
    bool in_service;
    int line;
};

// Shared normalization: contiguous renumbering, status filtering, per-unit
// injections with the mismatch absorbed at the slack bus.
PowerNetwork assemble(double base_mva, const std::vector<RawBus>& buses,
                      const std::vector<RawGen>& gens, const std::vector<RawBranch>& branches,
                      std::optional<int> explicit_slack_id, bool injections_are_pu,
                      const std::vector<double>& pu_injections) {
    if (buses.empty()) throw ParseError("case has no buses");
    PowerNetwork net;
    net.base_mva = base_mva;
    net.n_buses = static_cast<int>(buses.size());
    net.injections = Eigen::VectorXd::Zero(net.n_buses);
    std::unordered_map<int, int> index;
    for (int i = 0; i < net.n_buses; ++i) {
        const RawBus& b = buses[static_cast<std::size_t>(i)];
        if (!index.emplace(b.id, i).second)
            throw ParseError("duplicate bus id " + std::to_string(b.id), b.line);
        net.bus_ids.push_back(b.id);
        if (!injections_are_pu) net.injections(i) -= b.pd_mw;
    }

    if (injections_are_pu) {
        for (int i = 0; i < net.n_buses; ++i) net.injections(i) = pu_injections[static_cast<std::size_t>(i)];
    } else {
        for (const RawGen& g : gens) {
            auto it = index.find(g.bus);
            if (it == index.end())
                throw ParseError("generator references unknown bus " + std::to_string(g.bus), g.line);
            if (g.in_service) net.injections(it->second) += g.pg_mw;
        }
        net.injections /= base_mva;
    }

    int slack_id = -1;
    if (explicit_slack_id) {
        slack_id = *explicit_slack_id;
    } else {
        for (const RawBus& b : buses)
            if (b.type == 3) {
                slack_id = b.id;
                break;
            }
        if (slack_id < 0) throw ParseError("case has no type-3 (slack) bus");
    }
    auto slack_it = index.find(slack_id);
    if (slack_it == index.end())
        throw ParseError("slack references unknown bus " + std::to_string(slack_id));
    net.slack_bus = slack_it->second;
    net.injections(net.slack_bus) -= net.injections.sum();

    for (const RawBranch& rb : branches) {
        if (!rb.in_service) continue;
        auto fi = index.find(rb.from_id);
        auto ti = index.find(rb.to_id);
        if (fi == index.end())
            throw ParseError("branch references unknown bus " + std::to_string(rb.from_id), rb.line);
        if (ti == index.end())
            throw ParseError("branch references unknown bus " + std::to_string(rb.to_id), rb.line);
        if (!(rb.x > 0.0))
            throw ParseError("in-service branch with non-positive reactance", rb.line);
        Branch br;
        br.from = fi->second;
        br.to = ti->second;
        br.x = rb.x;
        br.tap = rb.tap != 0.0 ? rb.tap : 1.0;
        net.branches.push_back(br);
    }
    net.validate();
    return net;
}

// --- MATPOWER text ---------------------------------------------------------

struct MatrixBlock {
    std::vector<std::vector<double>> rows;
    std::vector<int> row_lines;
};

class MatpowerScanner {
  public:
    explicit MatpowerScanner(std::string_view text) : text_(text) {}

    void scan() {
        std::size_t pos = 0;
        int line = 1;
        while (pos < text_.size()) {
            std::size_t eol = text_.find('\n', pos);
            if (eol == std::string_view::npos) eol = text_.size();
            handle_line(text_.substr(pos, eol - pos), line);
            pos = eol + 1;
            ++line;
        }
        if (in_matrix_) throw ParseError("unterminated matrix block '" + current_name_ + "'", matrix_start_line_);
    }

    std::optional<double> scalar(const std::string& name) const {
        auto it = scalars_.find(name);
        if (it == scalars_.end()) return std::nullopt;
        return it->second;
    }

    const MatrixBlock* matrix(const std::string& name) const {
        auto it = matrices_.find(name);
        return it == matrices_.end() ? nullptr : &it->second;
    }

  private:
    static std::string_view strip_comment(std::string_view s) {
        std::size_t c = s.find('%');
        return c == std::string_view::npos ? s : s.substr(0, c);
    }

    static std::string_view trim(std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    }

    static double parse_number(std::string_view tok, int line) {
        double value = 0.0;
        const char* begin = tok.data();
        const char* end = tok.data() + tok.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end)
            throw ParseError("non-numeric field '" + std::string(tok) + "'", line);
        return value;
    }

    void handle_line(std::string_view raw, int line) {
        std::string_view s = trim(strip_comment(raw));
        if (s.empty()) return;
        if (!in_matrix_) {
            std::size_t eq = s.find('=');
            if (eq == std::string_view::npos) return;
            std::string_view lhs = trim(s.substr(0, eq));
            std::string_view rhs = trim(s.substr(eq + 1));
            if (lhs.rfind("mpc.", 0) == 0) lhs.remove_prefix(4);
            std::string name(lhs);
            if (rhs.rfind('[', 0) == 0) {
                in_matrix_ = true;
                current_name_ = name;
                matrix_start_line_ = line;
                matrices_[name] = MatrixBlock{};
                consume_matrix_text(rhs.substr(1), line);
            } else if (!rhs.empty() && rhs.back() == ';') {
                rhs = trim(rhs.substr(0, rhs.size() - 1));
                if (!rhs.empty() && rhs.front() != '\'' && rhs.front() != '"')
                    scalars_[name] = parse_number(rhs, line);
            }
        } else {
            consume_matrix_text(s, line);
        }
    }

    void consume_matrix_text(std::string_view s, int line) {
        s = trim(s);
        const std::size_t close = s.find(']');
        std::string_view body = close == std::string_view::npos ? s : s.substr(0, close);
        // rows end with ';' (possibly several per physical line)
        std::size_t start = 0;
        while (start < body.size()) {
            std::size_t semi = body.find(';', start);
            if (semi == std::string_view::npos) {
                pending_ += std::string(body.substr(start));
                pending_ += ' ';
                break;
            }
            flush_row(trim(body.substr(start, semi - start)), line);
            start = semi + 1;
        }
        if (close != std::string_view::npos) {
            flush_row({}, line);  // a last row may lack its trailing ';'
            in_matrix_ = false;
        }
    }

    void flush_row(std::string_view tail, int line) {
        std::string row_text = pending_ + std::string(tail);
        pending_.clear();
        std::istringstream iss(row_text);
        std::vector<double> row;
        std::string tok;
        while (iss >> tok) row.push_back(parse_number(tok, line));
        if (!row.empty()) {
            matrices_[current_name_].rows.push_back(std::move(row));
            matrices_[current_name_].row_lines.push_back(line);
        }
    }

    std::string_view text_;
    bool in_matrix_ = false;
    std::string current_name_;
    std::string pending_;
    int matrix_start_line_ = 0;
    std::unordered_map<std::string, double> scalars_;
    std::unordered_map<std::string, MatrixBlock> matrices_;
};

double column(const std::vector<double>& row, std::size_t idx, const char* what, int line) {
    if (idx >= row.size()) throw ParseError(std::string("missing ") + what + " column", line);
    return row[idx];
}

}  // namespace

PowerNetwork parse_matpower_case(std::string_view text) {
    MatpowerScanner scanner(text);
    scanner.scan();

    auto base = scanner.scalar("baseMVA");
    if (!base) throw ParseError("missing baseMVA");
    if (!(*base > 0.0)) throw ParseError("baseMVA must be positive");

    const MatrixBlock* bus = scanner.matrix("bus");
    if (!bus || bus->rows.empty()) throw ParseError("missing bus block");
    const MatrixBlock* branch = scanner.matrix("branch");
    if (!branch || branch->rows.empty()) throw ParseError("missing branch block");
    const MatrixBlock* gen = scanner.matrix("gen");  // optional

    std::vector<RawBus> buses;
    for (std::size_t i = 0; i < bus->rows.size(); ++i) {
        const auto& row = bus->rows[i];
        const int line = bus->row_lines[i];
        RawBus b;
        b.id = static_cast<int>(column(row, 0, "bus id", line));
        b.type = static_cast<int>(column(row, 1, "bus type", line));
        b.pd_mw = column(row, 2, "bus Pd", line);
        b.line = line;
        buses.push_back(b);
    }

    std::vector<RawGen> gens;
    if (gen) {
        for (std::size_t i = 0; i < gen->rows.size(); ++i) {
            const auto& row = gen->rows[i];
            const int line = gen->row_lines[i];
            RawGen g;
            g.bus = static_cast<int>(column(row, 0, "gen bus", line));
            g.pg_mw = column(row, 1, "gen Pg", line);
            g.in_service = column(row, 7, "gen status", line) > 0.0;
            g.line = line;
            gens.push_back(g);
        }
    }

    std::vector<RawBranch> branches;
    for (std::size_t i = 0; i < branch->rows.size(); ++i) {
        const auto& row = branch->rows[i];
        const int line = branch->row_lines[i];
        RawBranch rb;
        rb.from_id = static_cast<int>(column(row, 0, "branch fbus", line));
        rb.to_id = static_cast<int>(column(row, 1, "branch tbus", line));
        rb.x = column(row, 3, "branch x", line);
        rb.tap = column(row, 8, "branch ratio", line);
        rb.in_service = column(row, 10, "branch status", line) > 0.0;
        rb.line = line;
        branches.push_back(rb);
    }

    return assemble(*base, buses, gens, branches, std::nullopt, false, {});
}

PowerNetwork parse_native_network(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object()) throw ParseError("document root must be an object");
        if (!doc.contains("buses") || !doc["buses"].is_array())
            throw ParseError("missing 'buses' array");
        if (!doc.contains("branches") || !doc["branches"].is_array())
            throw ParseError("missing 'branches' array");
        if (!doc.contains("slack")) throw ParseError("missing 'slack'");

        std::vector<RawBus> buses;
        std::vector<double> injections;
        for (const auto& jb : doc["buses"]) {
            RawBus b;
            b.id = jb.at("id").get<int>();
            b.type = 1;
            b.pd_mw = 0.0;
            b.line = 0;
            buses.push_back(b);
            injections.push_back(jb.value("p_injection_pu", 0.0));
        }
        std::vector<RawBranch> branches;
        for (const auto& jb : doc["branches"]) {
            RawBranch rb;
            rb.from_id = jb.at("from").get<int>();
            rb.to_id = jb.at("to").get<int>();
            rb.x = jb.at("x_pu").get<double>();
            rb.tap = jb.value("tap", 0.0);
            rb.in_service = jb.value("status", 1) > 0;
            rb.line = 0;
            branches.push_back(rb);
        }
        const double base = doc.value("base_mva", 100.0);
        return assemble(base, buses, {}, branches, doc["slack"].get<int>(), true, injections);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("schema violation: ") + e.what());
    }
}

PowerNetwork load_network(const std::string& path, CaseFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open case file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    return format == CaseFormat::kMatpower ? parse_matpower_case(text) : parse_native_network(text);
}

}  // namespace pmuplace
