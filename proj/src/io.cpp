#include "enhvi/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace enhvi::io {

using nlohmann::json;

std::string format_value(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_value failed");
    return std::string(buf, p);
}

namespace {

double parse_value(const std::string& s, const std::filesystem::path& path, int line) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::runtime_error(path.string() + ":" + std::to_string(line) +
                                 ": not a number: '" + s + "'");
    return v;
}

long parse_int(const std::string& s, const std::filesystem::path& path, int line) {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::runtime_error(path.string() + ":" + std::to_string(line) +
                                 ": not an integer: '" + s + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

struct CsvReader {
    std::filesystem::path path;
    std::ifstream in;
    int line_no = 0;

    explicit CsvReader(const std::filesystem::path& p) : path(p), in(p) {
        if (!in) throw std::runtime_error("cannot open " + p.string());
    }

    void expect_header(const std::string& header) {
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error(path.string() + ": empty file, expected header '" +
                                     header + "'");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line != header)
            throw std::runtime_error(path.string() + ": bad header '" + line + "', expected '" +
                                     header + "'");
    }

    bool next(std::vector<std::string>& fields, std::size_t n_fields) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line == "\r") continue;
            fields = split_csv(line);
            if (fields.size() != n_fields)
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": expected " + std::to_string(n_fields) +
                                         " fields, got " + std::to_string(fields.size()));
            return true;
        }
        return false;
    }
};

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);  // '\n' endings, unconditionally
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

} // namespace

VariablePanel read_panel_csv(const std::filesystem::path& path, const std::string& variable_id) {
    CsvReader r(path);
    r.expect_header("region_code,level,resolution,year,sub,value");
    VariablePanel panel;
    panel.variable_id = variable_id.empty() ? path.stem().string() : variable_id;
    bool first = true;
    std::vector<std::string> f;
    while (r.next(f, 6)) {
        RegionId region{f[0], level_from_string(f[1])};
        TimeKey t{resolution_from_string(f[2]), static_cast<int>(parse_int(f[3], path, r.line_no)),
                  static_cast<int>(parse_int(f[4], path, r.line_no))};
        if (first) {
            panel.resolution = t.resolution;
            first = false;
        }
        std::optional<double> v;
        if (!f[5].empty()) v = parse_value(f[5], path, r.line_no);
        panel.values[PanelKey{region, t}] = v;
    }
    auto diags = validate_panel(panel);
    if (!diags.empty())
        throw std::runtime_error(path.string() + ": invalid panel: " + diags.front());
    return panel;
}

void write_panel_csv(const VariablePanel& panel, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "region_code,level,resolution,year,sub,value\n";
    for (const auto& [key, value] : panel.values) {
        out << key.region.code << ',' << to_string(key.region.level) << ','
            << to_string(key.time.resolution) << ',' << key.time.year << ',' << key.time.sub
            << ',' << (value ? format_value(*value) : std::string()) << '\n';
    }
}

GridSeries read_grid_csv(const std::filesystem::path& path) {
    CsvReader r(path);
    r.expect_header("cell_id,resolution,year,sub,value");
    GridSeries grid;
    bool first = true;
    std::vector<std::string> f;
    while (r.next(f, 5)) {
        TimeKey t{resolution_from_string(f[1]), static_cast<int>(parse_int(f[2], path, r.line_no)),
                  static_cast<int>(parse_int(f[3], path, r.line_no))};
        if (first) {
            grid.resolution = t.resolution;
            first = false;
        }
        std::optional<double> v;
        if (!f[4].empty()) v = parse_value(f[4], path, r.line_no);
        grid.values[{f[0], t}] = v;
    }
    return grid;
}

void write_grid_csv(const GridSeries& grid, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "cell_id,resolution,year,sub,value\n";
    for (const auto& [key, value] : grid.values) {
        out << key.first << ',' << to_string(key.second.resolution) << ',' << key.second.year
            << ',' << key.second.sub << ','
            << (value ? format_value(*value) : std::string()) << '\n';
    }
}

CellWeightTable read_cell_weights_csv(const std::filesystem::path& path) {
    CsvReader r(path);
    r.expect_header("cell_id,region_code,level,weight");
    CellWeightTable table;
    std::vector<std::string> f;
    while (r.next(f, 4)) {
        table.entries.push_back({f[0], RegionId{f[1], level_from_string(f[2])},
                                 parse_value(f[3], path, r.line_no)});
    }
    table.validate();
    return table;
}

void write_cell_weights_csv(const CellWeightTable& table, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "cell_id,region_code,level,weight\n";
    for (const auto& e : table.entries) {
        out << e.cell_id << ',' << e.region.code << ',' << to_string(e.region.level) << ','
            << format_value(e.weight) << '\n';
    }
}

MortalityTable read_mortality_csv(const std::filesystem::path& path) {
    CsvReader r(path);
    r.expect_header("region_code,cause,period_start,period_end,rate");
    MortalityTable table;
    std::vector<std::string> f;
    while (r.next(f, 5)) {
        table.entries.push_back({RegionId{f[0], Level::SA3}, f[1],
                                 static_cast<int>(parse_int(f[2], path, r.line_no)),
                                 static_cast<int>(parse_int(f[3], path, r.line_no)),
                                 parse_value(f[4], path, r.line_no)});
        if (table.entries.back().rate < 0)
            throw std::runtime_error(path.string() + ":" + std::to_string(r.line_no) +
                                     ": negative mortality rate");
    }
    return table;
}

void write_mortality_csv(const MortalityTable& table, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "region_code,cause,period_start,period_end,rate\n";
    for (const auto& e : table.entries) {
        out << e.region.code << ',' << e.cause << ',' << e.period_start << ',' << e.period_end
            << ',' << format_value(e.rate) << '\n';
    }
}

RegionMapping read_crosswalk_csv(const std::filesystem::path& path) {
    CsvReader r(path);
    r.expect_header("target_code,target_level,source_code,source_level");
    RegionMapping mapping;
    std::vector<std::string> f;
    while (r.next(f, 4)) {
        mapping[RegionId{f[0], level_from_string(f[1])}] =
            RegionId{f[2], level_from_string(f[3])};
    }
    return mapping;
}

void write_crosswalk_csv(const RegionMapping& mapping, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "target_code,target_level,source_code,source_level\n";
    for (const auto& [target, source] : mapping) {
        out << target.code << ',' << to_string(target.level) << ',' << source.code << ','
            << to_string(source.level) << '\n';
    }
}

IndexSpec read_index_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json doc = json::parse(in);
    IndexSpec spec;
    spec.index_id = doc.at("index_id").get<std::string>();
    spec.method = index_method_from_string(doc.at("method").get<std::string>());
    for (const auto& sub : doc.at("sub_indices")) {
        SubIndexSpec s;
        s.kind = sub_index_kind_from_string(sub.at("kind").get<std::string>());
        for (const auto& theme : sub.at("themes")) {
            ThemeSpec t;
            t.theme_id = theme.at("theme_id").get<std::string>();
            for (const auto& var : theme.at("variables")) {
                Polarity pol;
                pol.direction = var.at("polarity").get<std::string>() == "risk_decreasing"
                                    ? PolarityDir::RiskDecreasing
                                    : PolarityDir::RiskIncreasing;
                t.variables.emplace_back(var.at("id").get<std::string>(), pol);
            }
            s.themes.push_back(std::move(t));
        }
        spec.sub_indices.push_back(std::move(s));
    }
    spec.validate();
    return spec;
}

void write_index_spec(const IndexSpec& spec, const std::filesystem::path& path) {
    json doc;
    doc["index_id"] = spec.index_id;
    doc["method"] = to_string(spec.method);
    doc["sub_indices"] = json::array();
    for (const auto& sub : spec.sub_indices) {
        json s;
        s["kind"] = to_string(sub.kind);
        s["themes"] = json::array();
        for (const auto& theme : sub.themes) {
            json t;
            t["theme_id"] = theme.theme_id;
            t["variables"] = json::array();
            for (const auto& [vid, pol] : theme.variables) {
                t["variables"].push_back(
                    {{"id", vid},
                     {"polarity", pol.direction == PolarityDir::RiskDecreasing
                                      ? "risk_decreasing"
                                      : "risk_increasing"}});
            }
            s["themes"].push_back(std::move(t));
        }
        doc["sub_indices"].push_back(std::move(s));
    }
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

WeightTable read_weight_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json doc = json::parse(in);
    WeightTable table;
    table.mortality_category =
        mortality_category_from_string(doc.at("mortality_category").get<std::string>());
    for (const auto& e : doc.at("entries")) {
        WeightKey key{e.at("variable_id").get<std::string>(),
                      e.at("theme_id").get<std::string>(),
                      sub_index_kind_from_string(e.at("sub_index").get<std::string>())};
        const double w = e.at("weight").get<double>();
        if (w < -1.0 || w > 1.0)
            throw std::runtime_error(path.string() + ": weight out of [-1,1] for variable '" +
                                     key.variable_id + "'");
        table.entries[key] = w;
    }
    if (doc.contains("diagnostics"))
        table.diagnostics = doc["diagnostics"].get<std::vector<std::string>>();
    return table;
}

void write_weight_table(const WeightTable& table, const std::filesystem::path& path) {
    json doc;
    doc["mortality_category"] = to_string(table.mortality_category);
    doc["entries"] = json::array();
    for (const auto& [key, w] : table.entries) {
        doc["entries"].push_back({{"variable_id", key.variable_id},
                                  {"theme_id", key.theme_id},
                                  {"sub_index", to_string(key.sub_index)},
                                  {"weight", w}});
    }
    doc["diagnostics"] = table.diagnostics;
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

} // namespace enhvi::io
