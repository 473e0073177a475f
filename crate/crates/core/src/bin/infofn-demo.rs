fn main() {
    std::process::exit(infofn::demo::demo_main(std::env::args_os()));
}
