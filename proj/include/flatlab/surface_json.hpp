#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "flatlab/surface.hpp"

namespace flatlab {

using json = nlohmann::json;

inline json surface_to_json(const SurfaceData& d) {
    json j;
    j["polygons"] = json::array();
    for (const auto& pl : d.polygons) {
        json jp = json::array();
        for (const auto& v : pl) jp.push_back({v.x, v.y});
        j["polygons"].push_back(jp);
    }
    j["gluings"] = json::array();
    for (const auto& [e1, e2] : d.gluings)
        j["gluings"].push_back({{e1.poly, e1.edge}, {e2.poly, e2.edge}});
    if (!d.basis.empty()) {
        j["basis"] = json::array();
        for (const auto& ps : d.basis) {
            json jb;
            jb["name"] = ps.name;
            jb["segments"] = json::array();
            for (const auto& s : ps.segments)
                jb["segments"].push_back(
                    {{"poly", s.poly}, {"from", {s.from.x, s.from.y}}, {"to", {s.to.x, s.to.y}}});
            j["basis"].push_back(jb);
        }
    }
    return j;
}

inline json surface_to_json(const TranslationSurface& s) { return surface_to_json(s.data); }

inline SurfaceData surface_from_json(const json& j, NumericPolicy policy = {}) {
    SurfaceData d;
    d.policy = policy;
    if (!j.contains("polygons") || !j.contains("gluings"))
        throw InvalidParameter("surface JSON needs 'polygons' and 'gluings'");
    for (const auto& jp : j.at("polygons")) {
        std::vector<Vec2> pl;
        for (const auto& jv : jp) pl.push_back({jv.at(0).get<double>(), jv.at(1).get<double>()});
        d.polygons.push_back(std::move(pl));
    }
    for (const auto& jg : j.at("gluings")) {
        EdgeRef e1{jg.at(0).at(0).get<int>(), jg.at(0).at(1).get<int>()};
        EdgeRef e2{jg.at(1).at(0).get<int>(), jg.at(1).at(1).get<int>()};
        d.gluings.emplace_back(e1, e2);
    }
    if (j.contains("basis")) {
        for (const auto& jb : j.at("basis")) {
            PathSpec ps;
            ps.name = jb.value("name", "");
            for (const auto& js : jb.at("segments")) {
                PathSeg seg;
                seg.poly = js.at("poly").get<int>();
                seg.from = {js.at("from").at(0).get<double>(), js.at("from").at(1).get<double>()};
                seg.to = {js.at("to").at(0).get<double>(), js.at("to").at(1).get<double>()};
                ps.segments.push_back(seg);
            }
            d.basis.push_back(std::move(ps));
        }
    }
    return d;
}

inline void save_surface(const TranslationSurface& s, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw InvalidParameter("cannot open for writing: " + path);
    os << surface_to_json(s).dump(2) << "\n";
}

inline SurfaceData load_surface_data(const std::string& path, NumericPolicy policy = {}) {
    std::ifstream is(path);
    if (!is) throw InvalidParameter("cannot open: " + path);
    json j = json::parse(is);
    return surface_from_json(j, policy);
}

inline TranslationSurface load_surface(const std::string& path, NumericPolicy policy = {}) {
    return TranslationSurface::make(load_surface_data(path, policy));
}

}  // namespace flatlab
