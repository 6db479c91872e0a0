#include "xcmix/chain_io.hpp"

#include "xcmix/csv.hpp"

#include <fstream>

namespace xcmix {

using nlohmann::json;

json chain_metadata_json(const ChainOutput& chain) {
    const auto& m = chain.meta;
    return {
        {"format", "xcmix-chain"},
        {"version", kChainFormatVersion},
        {"engine_version", kEngineVersion},
        {"seed", m.seed},
        {"chain_index", m.chain_index},
        {"config", to_json(m.config)},
        {"distance_center", m.distance_center},
        {"windspeed_center", m.windspeed_center},
        {"levels", {{"athletes", m.athletes}, {"courses", m.courses}, {"seasons", m.seasons}}},
        {"columns", chain.names},
        {"rows", chain.rows()},
        {"kernel_backend", m.kernel_backend},
    };
}

void write_chain(const ChainOutput& chain, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path) {
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw InputError("cannot write '" + csv_path.string() + "'");
        for (std::size_t j = 0; j < chain.names.size(); ++j) out << (j ? "," : "") << csv::quote(chain.names[j]);
        out << '\n';
        std::string line;
        for (std::size_t r = 0; r < chain.rows(); ++r) {
            line.clear();
            auto row = chain.row(r);
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (j) line += ',';
                line += csv::format_double(row[j]);
            }
            line += '\n';
            out << line;
        }
    }
    std::ofstream meta(json_path, std::ios::binary);
    if (!meta) throw InputError("cannot write '" + json_path.string() + "'");
    meta << chain_metadata_json(chain).dump(2) << '\n';
}

ChainOutput read_chain(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
    json doc;
    {
        std::ifstream in(json_path);
        if (!in) throw InputError("cannot open '" + json_path.string() + "'");
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw InputError("'" + json_path.string() + "': " + e.what());
        }
    }
    ChainOutput chain;
    try {
        if (doc.at("format") != "xcmix-chain" || doc.at("version").get<int>() != kChainFormatVersion)
            throw InputError("'" + json_path.string() + "' is not a supported chain sidecar");
        auto& m = chain.meta;
        m.seed = doc.at("seed").get<std::uint64_t>();
        m.chain_index = doc.at("chain_index").get<std::uint64_t>();
        m.config = config_from_json(doc.at("config"));
        m.distance_center = doc.at("distance_center").get<double>();
        m.windspeed_center = doc.at("windspeed_center").get<double>();
        m.athletes = doc.at("levels").at("athletes").get<std::vector<std::string>>();
        m.courses = doc.at("levels").at("courses").get<std::vector<std::string>>();
        m.seasons = doc.at("levels").at("seasons").get<std::vector<std::string>>();
        m.kernel_backend = doc.value("kernel_backend", "");
        chain.names = doc.at("columns").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw InputError("'" + json_path.string() + "': " + e.what());
    }
    chain.layout = {chain.meta.athletes.size(), chain.meta.courses.size(), chain.meta.seasons.size(),
                    chain.meta.config.include_windspeed};
    if (chain.layout.size() != chain.names.size())
        throw InputError("'" + json_path.string() + "': column count does not match level dictionaries");

    auto table = csv::read(csv_path);
    if (table.header != chain.names) throw InputError("'" + csv_path.string() + "': columns disagree with sidecar");
    chain.draws.reserve(table.rows.size() * chain.names.size());
    for (const auto& row : table.rows) {
        if (row.fields.size() != chain.names.size())
            throw InputError("'" + csv_path.string() + "' line " + std::to_string(row.line) + ": wrong field count");
        for (const auto& f : row.fields) chain.draws.push_back(csv::parse_double(f, "draw", csv_path, row.line));
    }
    return chain;
}

} // namespace xcmix
