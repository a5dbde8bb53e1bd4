// Placeholder main; subcommands are wired up as modules land.
int main() { return 0; }
