// Writes the bundled case-study sources into a directory (default: models).

#include "ifsynth/bundled.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    const std::filesystem::path dir = argc > 1 ? argv[1] : "models";
    std::filesystem::create_directories(dir);
    for (const auto& [name, text] : ifsynth::bundled::all()) {
        std::ofstream(dir / name, std::ios::binary) << text;
        std::cout << (dir / name).string() << "\n";
    }
}
