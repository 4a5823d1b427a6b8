// placeholder; replaced once the library modules are in
int main() { return 0; }
