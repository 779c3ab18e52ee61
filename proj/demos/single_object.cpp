// Minimal library walkthrough: build a scene, sample grasps, print the best.
#include "graspgen/mesh_queries.hpp"

#include <cstdio>

int main() {
    std::puts("demo: placeholder");
    return 0;
}
