// Writes the bundled identification datasets: chirp-plus-step excitation through the identified
// elevation and azimuth models, sampled at 2 ms for 4 s.

#include <cstdio>
#include <fstream>
#include <string>

#include "pointing/sysid.hpp"

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "data";
    const struct {
        const char* file;
        pointing::model::PlantParams params;
    } sets[] = {{"/h11_chirp.csv", pointing::model::kElevationPlant},
                {"/h22_chirp.csv", pointing::model::kAzimuthPlant}};
    for (const auto& set : sets) {
        const auto data = pointing::sysid::synthesize_dataset(set.params, 2000, 0.002);
        std::ofstream out(dir + set.file);
        if (!out) {
            std::fprintf(stderr, "cannot write %s%s\n", dir.c_str(), set.file);
            return 3;
        }
        pointing::sysid::write_dataset_csv(out, data);
    }
    return 0;
}
