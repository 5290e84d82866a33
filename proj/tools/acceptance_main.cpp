// Placeholder; replaced by the acceptance gate implementation.
int main() { return 1; }
