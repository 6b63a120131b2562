#include <cstdio>

int main() {
    std::puts("tilekit: CLI not wired up yet");
    return 0;
}
