#include "mpspec/fixtures.hpp"

#include "mpspec/error.hpp"
#include "mpspec/io.hpp"

#include <filesystem>
#include <fstream>

namespace mpspec {

namespace {

CMatrix mat32(double a, double b, double c, double d, double e, double f) {
    CMatrix m(3, 2);
    m << a, b, c, d, e, f;
    return m;
}

}  // namespace

MultiParamPencil running_example() {
    return MultiParamPencil::linear({-mat32(6, 4, 0, 2, 2, 2), mat32(2, 1, 0, 0, 2, 0),
                                     mat32(2, 1, 0, 2, 0, 2)});
}

MultiParamPencil second_example() {
    return MultiParamPencil::linear({mat32(2, 6, 4, 5, 0, 1), mat32(1, 0, 0, 1, 1, 1),
                                     mat32(4, 2, 0, 8, 1, 1)});
}

MultiParamPencil hankel_example() {
    return MultiParamPencil::linear({mat32(0.0260, 0.4380, 0.4380, 0.6542, 0.6542, 1.4192),
                                     mat32(-1.6324, 0.1128, 0.1128, -0.4401, -0.4401, -0.6968),
                                     mat32(3.3280, -0.3346, -0.3346, 0.6774, 0.6774, -0.0754)});
}

RVector realization_data() {
    RVector y(5);
    y << 2.0, 4.0, 3.0, 3.5, 3.25;
    return y;
}

std::vector<std::string> install_examples(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create directory '" + dir + "': " + ec.message());
    std::vector<std::string> written;
    auto write = [&](const std::string& name, const std::string& text) {
        const std::string path = (fs::path(dir) / name).string();
        std::ofstream out(path);
        if (!out) throw InputError("cannot write '" + path + "'");
        out << text;
        written.push_back(path);
    };
    write("running.json", pencil_to_json(running_example()).dump(2) + "\n");
    write("second.json", pencil_to_json(second_example()).dump(2) + "\n");
    write("hankel.json", pencil_to_json(hankel_example()).dump(2) + "\n");
    std::string csv = "y\n";
    const RVector y = realization_data();
    for (Eigen::Index i = 0; i < y.size(); ++i) csv += json(y(i)).dump() + "\n";
    write("realization.csv", csv);
    return written;
}

}  // namespace mpspec
